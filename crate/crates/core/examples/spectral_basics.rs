//! Transforms, circular correlation and the Parseval identity on small
//! vectors.

use holex::spectral;

fn main() -> holex::Result<()> {
    let a = [1.0, 2.0, 3.0, 4.0];
    let b = [0.5, -1.0, 0.0, 2.0];

    let spectrum = spectral::dft(&a)?;
    println!("dft(a) = {spectrum:?}");
    println!("s(a) = {}, t(a) = {:?}", spectral::spectrum_sum(&a), spectral::alternating_sum(&a));

    let direct = spectral::circular_correlation_direct(&a, &b)?;
    let fourier = spectral::circular_correlation(&a, &b)?;
    println!("a ⋆ b direct  = {direct:?}");
    println!("a ⋆ b fourier = {fourier:?}");
    println!("a ∗ b         = {:?}", spectral::circular_convolution_direct(&a, &b)?);

    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    println!("a·b = {dot}, via spectra = {}", spectral::parseval_dot(&a, &b)?);
    Ok(())
}
