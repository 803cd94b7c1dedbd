//! HolE and ComplEx parameter stores, scores and analytic score gradients.
//!
//! Both models keep their parameters in [`ParamTable`]s of `f64`. A HolE row
//! is the real embedding itself (`K` values). A ComplEx row of rank `K` is
//! stored as `2K` values: the `K` real parts followed by the `K` imaginary
//! parts. Gradients and optimizer state share that layout, so training code
//! never needs to know which model it is updating.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

/// Below this rank (or for non power-of-two ranks) HolE scores through the
/// direct correlation sum instead of the FFT.
pub const FOURIER_PATH_MIN_RANK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "hole")]
    HolE,
    #[serde(rename = "complex")]
    ComplEx,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::HolE => "hole",
            ModelKind::ComplEx => "complex",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hole" => Ok(ModelKind::HolE),
            "complex" => Ok(ModelKind::ComplEx),
            other => Err(Error::invalid(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Dense row-major matrix of parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTable {
    rows: usize,
    width: usize,
    data: Vec<f64>,
}

impl ParamTable {
    pub fn zeros(rows: usize, width: usize) -> Self {
        ParamTable {
            rows,
            width,
            data: vec![0.0; rows * width],
        }
    }

    pub fn from_vec(rows: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * width {
            return Err(Error::invalid(format!(
                "table of {rows}x{width} needs {} values, got {}",
                rows * width,
                data.len()
            )));
        }
        Ok(ParamTable { rows, width, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.width)
    }

    fn gaussian(rows: usize, width: usize, std_dev: f64, rng: &mut ChaCha8Rng) -> Self {
        let normal = Normal::new(0.0, std_dev).expect("positive standard deviation");
        let data = (0..rows * width).map(|_| normal.sample(rng)).collect();
        ParamTable { rows, width, data }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKind {
    Entity,
    Relation,
}

/// Sparse gradient over parameter rows. Only rows that received a
/// contribution are present.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Gradient {
    rows: BTreeMap<(ParamKind, usize), Vec<f64>>,
}

impl Gradient {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `scale · values` into the row `(kind, index)`.
    pub fn add(&mut self, kind: ParamKind, index: usize, scale: f64, values: &[f64]) {
        let row = self
            .rows
            .entry((kind, index))
            .or_insert_with(|| vec![0.0; values.len()]);
        for (g, v) in row.iter_mut().zip(values) {
            *g += scale * v;
        }
    }

    /// The row `(kind, index)`, inserted as zeros of length `width` if absent.
    pub(crate) fn row_mut(&mut self, kind: ParamKind, index: usize, width: usize) -> &mut [f64] {
        self.rows.entry((kind, index)).or_insert_with(|| vec![0.0; width])
    }

    pub fn get(&self, kind: ParamKind, index: usize) -> Option<&[f64]> {
        self.rows.get(&(kind, index)).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamKind, usize, &[f64])> {
        self.rows.iter().map(|(&(k, i), v)| (k, i, v.as_slice()))
    }

    pub fn clear(&mut self) {
        self.rows.clear();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(n_entities: usize, n_relations: usize, rank: usize) -> Result<()> {
    if n_entities == 0 || n_relations == 0 || rank == 0 {
        return Err(Error::invalid(format!(
            "model dimensions must be positive (entities={n_entities}, relations={n_relations}, rank={rank})"
        )));
    }
    Ok(())
}

fn check_rows<'a>(rows: impl Iterator<Item = &'a Vec<f64>>, width: usize) -> Result<Vec<f64>> {
    let mut data = Vec::new();
    for row in rows {
        if row.len() != width {
            return Err(Error::invalid(format!(
                "row of length {} in a table of width {width}",
                row.len()
            )));
        }
        data.extend_from_slice(row);
    }
    Ok(data)
}

/// Real-valued holographic embeddings, scored with `r_p · (e_s ⋆ e_o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolEModel {
    pub entities: ParamTable,
    pub relations: ParamTable,
    pub seed: u64,
}

impl HolEModel {
    pub fn init(n_entities: usize, n_relations: usize, rank: usize, seed: u64) -> Result<Self> {
        check_dims(n_entities, n_relations, rank)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let std_dev = 1.0 / (rank as f64).sqrt();
        Ok(HolEModel {
            entities: ParamTable::gaussian(n_entities, rank, std_dev, &mut rng),
            relations: ParamTable::gaussian(n_relations, rank, std_dev, &mut rng),
            seed,
        })
    }

    pub fn from_rows(entities: &[Vec<f64>], relations: &[Vec<f64>]) -> Result<Self> {
        let rank = entities.first().map_or(0, Vec::len);
        check_dims(entities.len(), relations.len(), rank)?;
        Ok(HolEModel {
            entities: ParamTable::from_vec(entities.len(), rank, check_rows(entities.iter(), rank)?)?,
            relations: ParamTable::from_vec(
                relations.len(),
                rank,
                check_rows(relations.iter(), rank)?,
            )?,
            seed: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.entities.width()
    }

    /// Correlation form `r_p · (e_s ⋆ e_o)` by direct summation.
    pub fn score_direct(&self, p: usize, s: usize, o: usize) -> f64 {
        let mut corr = vec![0.0; self.rank()];
        spectral::correlate_into(self.entities.row(s), self.entities.row(o), &mut corr);
        dot(self.relations.row(p), &corr)
    }

    /// Frequency-domain form `(1/K)·Re⟨F(r_p), F(e_s), conj(F(e_o))⟩`.
    pub fn score_fourier(&self, p: usize, s: usize, o: usize) -> f64 {
        let fr = spectral::dft(self.relations.row(p)).expect("rank ≥ 1");
        let fs = spectral::dft(self.entities.row(s)).expect("rank ≥ 1");
        let fo: Vec<Complex64> = spectral::dft(self.entities.row(o))
            .expect("rank ≥ 1")
            .into_iter()
            .map(|z| z.conj())
            .collect();
        let tri = spectral::trilinear_product(&fr, &fs, &fo).expect("equal lengths");
        tri.re / self.rank() as f64
    }

    pub fn score(&self, p: usize, s: usize, o: usize) -> f64 {
        let k = self.rank();
        if k >= FOURIER_PATH_MIN_RANK && k.is_power_of_two() {
            self.score_fourier(p, s, o)
        } else {
            self.score_direct(p, s, o)
        }
    }

    fn accumulate_grad(&self, p: usize, s: usize, o: usize, weight: f64, grad: &mut Gradient) {
        self.score_then_grad(p, s, o, grad, |_| weight);
    }

    /// Scores the triple, then adds `weight(score) · ∂φ/∂Θ` to `grad`, sharing
    /// `e_s ⋆ e_o` between the two.
    fn score_then_grad(
        &self,
        p: usize,
        s: usize,
        o: usize,
        grad: &mut Gradient,
        weight: impl FnOnce(f64) -> f64,
    ) -> f64 {
        let k = self.rank();
        let (r, es, eo) = (self.relations.row(p), self.entities.row(s), self.entities.row(o));
        let mut buf = vec![0.0; k];
        // ∂/∂r = e_s ⋆ e_o
        spectral::correlate_into(es, eo, &mut buf);
        let score = dot(r, &buf);
        let weight = weight(score);
        if weight == 0.0 {
            return score;
        }
        grad.add(ParamKind::Relation, p, weight, &buf);
        // ∂/∂e_s = r ⋆ e_o
        spectral::correlate_into(r, eo, &mut buf);
        grad.add(ParamKind::Entity, s, weight, &buf);
        // ∂/∂e_o = e_s ∗ r
        spectral::convolve_into(es, r, &mut buf);
        grad.add(ParamKind::Entity, o, weight, &buf);
        score
    }

    fn object_query(&self, p: usize, s: usize) -> Vec<f64> {
        let mut q = vec![0.0; self.rank()];
        spectral::convolve_into(self.entities.row(s), self.relations.row(p), &mut q);
        q
    }

    fn subject_query(&self, p: usize, o: usize) -> Vec<f64> {
        let mut q = vec![0.0; self.rank()];
        spectral::correlate_into(self.relations.row(p), self.entities.row(o), &mut q);
        q
    }
}

/// Complex embeddings, scored with `Re⟨r_p, e_s, conj(e_o)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplExModel {
    pub entities: ParamTable,
    pub relations: ParamTable,
    pub seed: u64,
}

/// Real and imaginary halves of a packed row, each of length exactly `k`.
#[inline]
fn split_halves(row: &[f64], k: usize) -> (&[f64], &[f64]) {
    (&row[..k], &row[k..2 * k])
}

fn pack_complex(row: &[Complex64]) -> Vec<f64> {
    row.iter().map(|z| z.re).chain(row.iter().map(|z| z.im)).collect()
}

fn unpack_complex(row: &[f64]) -> Vec<Complex64> {
    let (re, im) = row.split_at(row.len() / 2);
    re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

impl ComplExModel {
    pub fn init(n_entities: usize, n_relations: usize, rank: usize, seed: u64) -> Result<Self> {
        check_dims(n_entities, n_relations, rank)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let std_dev = 1.0 / (rank as f64).sqrt();
        Ok(ComplExModel {
            entities: ParamTable::gaussian(n_entities, 2 * rank, std_dev, &mut rng),
            relations: ParamTable::gaussian(n_relations, 2 * rank, std_dev, &mut rng),
            seed,
        })
    }

    pub fn from_rows(entities: &[Vec<Complex64>], relations: &[Vec<Complex64>]) -> Result<Self> {
        let rank = entities.first().map_or(0, Vec::len);
        check_dims(entities.len(), relations.len(), rank)?;
        let packed_e: Vec<Vec<f64>> = entities.iter().map(|r| pack_complex(r)).collect();
        let packed_r: Vec<Vec<f64>> = relations.iter().map(|r| pack_complex(r)).collect();
        Ok(ComplExModel {
            entities: ParamTable::from_vec(entities.len(), 2 * rank, check_rows(packed_e.iter(), 2 * rank)?)?,
            relations: ParamTable::from_vec(
                relations.len(),
                2 * rank,
                check_rows(packed_r.iter(), 2 * rank)?,
            )?,
            seed: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.entities.width() / 2
    }

    pub fn entity(&self, i: usize) -> Vec<Complex64> {
        unpack_complex(self.entities.row(i))
    }

    pub fn relation(&self, p: usize) -> Vec<Complex64> {
        unpack_complex(self.relations.row(p))
    }

    pub fn score(&self, p: usize, s: usize, o: usize) -> f64 {
        let k = self.rank();
        let (ra, rb) = split_halves(self.relations.row(p), k);
        let (sc, sd) = split_halves(self.entities.row(s), k);
        let (oe, of) = split_halves(self.entities.row(o), k);
        let mut acc = 0.0;
        for j in 0..k {
            let (a, b, c, d, e, f) = (ra[j], rb[j], sc[j], sd[j], oe[j], of[j]);
            acc += (a * c - b * d) * e + (a * d + b * c) * f;
        }
        acc
    }

    fn accumulate_grad(&self, p: usize, s: usize, o: usize, weight: f64, grad: &mut Gradient) {
        let k = self.rank();
        let (ra, rb) = split_halves(self.relations.row(p), k);
        let (sc, sd) = split_halves(self.entities.row(s), k);
        let (oe, of) = split_halves(self.entities.row(o), k);
        // s and o may be the same row, so each target row is filled in its
        // own pass.
        let (g_re, g_im) = grad.row_mut(ParamKind::Relation, p, 2 * k).split_at_mut(k);
        let g_im = &mut g_im[..k];
        for j in 0..k {
            g_re[j] += weight * (sc[j] * oe[j] + sd[j] * of[j]);
            g_im[j] += weight * (sc[j] * of[j] - sd[j] * oe[j]);
        }
        let (g_re, g_im) = grad.row_mut(ParamKind::Entity, s, 2 * k).split_at_mut(k);
        let g_im = &mut g_im[..k];
        for j in 0..k {
            g_re[j] += weight * (ra[j] * oe[j] + rb[j] * of[j]);
            g_im[j] += weight * (ra[j] * of[j] - rb[j] * oe[j]);
        }
        let (g_re, g_im) = grad.row_mut(ParamKind::Entity, o, 2 * k).split_at_mut(k);
        let g_im = &mut g_im[..k];
        for j in 0..k {
            g_re[j] += weight * (ra[j] * sc[j] - rb[j] * sd[j]);
            g_im[j] += weight * (ra[j] * sd[j] + rb[j] * sc[j]);
        }
    }

    fn object_query(&self, p: usize, s: usize) -> Vec<f64> {
        let k = self.rank();
        let (ra, rb) = self.relations.row(p).split_at(k);
        let (sc, sd) = self.entities.row(s).split_at(k);
        let mut q = vec![0.0; 2 * k];
        for j in 0..k {
            q[j] = ra[j] * sc[j] - rb[j] * sd[j];
            q[k + j] = ra[j] * sd[j] + rb[j] * sc[j];
        }
        q
    }

    fn subject_query(&self, p: usize, o: usize) -> Vec<f64> {
        let k = self.rank();
        let (ra, rb) = self.relations.row(p).split_at(k);
        let (oe, of) = self.entities.row(o).split_at(k);
        let mut q = vec![0.0; 2 * k];
        for j in 0..k {
            q[j] = ra[j] * oe[j] + rb[j] * of[j];
            q[k + j] = ra[j] * of[j] - rb[j] * oe[j];
        }
        q
    }
}

/// Either scoring function behind one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    HolE(HolEModel),
    ComplEx(ComplExModel),
}

impl From<HolEModel> for Model {
    fn from(m: HolEModel) -> Self {
        Model::HolE(m)
    }
}

impl From<ComplExModel> for Model {
    fn from(m: ComplExModel) -> Self {
        Model::ComplEx(m)
    }
}

impl Model {
    /// Gaussian initialization with standard deviation `1/√K` per real
    /// coordinate (real and imaginary parts drawn independently).
    pub fn init(
        kind: ModelKind,
        n_entities: usize,
        n_relations: usize,
        rank: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(match kind {
            ModelKind::HolE => HolEModel::init(n_entities, n_relations, rank, seed)?.into(),
            ModelKind::ComplEx => ComplExModel::init(n_entities, n_relations, rank, seed)?.into(),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::HolE(_) => ModelKind::HolE,
            Model::ComplEx(_) => ModelKind::ComplEx,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Model::HolE(m) => m.rank(),
            Model::ComplEx(m) => m.rank(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Model::HolE(m) => m.seed,
            Model::ComplEx(m) => m.seed,
        }
    }

    pub fn entities(&self) -> &ParamTable {
        match self {
            Model::HolE(m) => &m.entities,
            Model::ComplEx(m) => &m.entities,
        }
    }

    pub fn relations(&self) -> &ParamTable {
        match self {
            Model::HolE(m) => &m.relations,
            Model::ComplEx(m) => &m.relations,
        }
    }

    pub fn table_mut(&mut self, kind: ParamKind) -> &mut ParamTable {
        match (self, kind) {
            (Model::HolE(m), ParamKind::Entity) => &mut m.entities,
            (Model::HolE(m), ParamKind::Relation) => &mut m.relations,
            (Model::ComplEx(m), ParamKind::Entity) => &mut m.entities,
            (Model::ComplEx(m), ParamKind::Relation) => &mut m.relations,
        }
    }

    pub fn table(&self, kind: ParamKind) -> &ParamTable {
        match kind {
            ParamKind::Entity => self.entities(),
            ParamKind::Relation => self.relations(),
        }
    }

    pub fn n_entities(&self) -> usize {
        self.entities().rows()
    }

    pub fn n_relations(&self) -> usize {
        self.relations().rows()
    }

    pub fn check_ids(&self, p: usize, s: usize, o: usize) -> Result<()> {
        let (ne, nr) = (self.n_entities(), self.n_relations());
        if p >= nr || s >= ne || o >= ne {
            return Err(Error::invalid(format!(
                "triple ({p}, {s}, {o}) out of range for {nr} relations and {ne} entities"
            )));
        }
        Ok(())
    }

    pub fn score(&self, p: usize, s: usize, o: usize) -> Result<f64> {
        self.check_ids(p, s, o)?;
        Ok(self.score_unchecked(p, s, o))
    }

    pub(crate) fn score_unchecked(&self, p: usize, s: usize, o: usize) -> f64 {
        match self {
            Model::HolE(m) => m.score(p, s, o),
            Model::ComplEx(m) => m.score(p, s, o),
        }
    }

    /// `weight · ∂φ(p,s,o)/∂Θ` as a sparse gradient.
    pub fn grad_score(&self, weight: f64, p: usize, s: usize, o: usize) -> Result<Gradient> {
        self.check_ids(p, s, o)?;
        let mut grad = Gradient::new();
        self.accumulate_score_grad(weight, p, s, o, &mut grad);
        Ok(grad)
    }

    pub(crate) fn accumulate_score_grad(
        &self,
        weight: f64,
        p: usize,
        s: usize,
        o: usize,
        grad: &mut Gradient,
    ) {
        if weight == 0.0 {
            return;
        }
        match self {
            Model::HolE(m) => m.accumulate_grad(p, s, o, weight, grad),
            Model::ComplEx(m) => m.accumulate_grad(p, s, o, weight, grad),
        }
    }

    /// Scores `(p, s, o)` and adds `weight(score) · ∂φ/∂Θ` into `grad`.
    pub(crate) fn score_then_grad(
        &self,
        p: usize,
        s: usize,
        o: usize,
        grad: &mut Gradient,
        weight: impl FnOnce(f64) -> f64,
    ) -> f64 {
        match self {
            Model::HolE(m) => m.score_then_grad(p, s, o, grad, weight),
            Model::ComplEx(m) => {
                let score = m.score(p, s, o);
                let w = weight(score);
                if w != 0.0 {
                    m.accumulate_grad(p, s, o, w, grad);
                }
                score
            }
        }
    }

    /// Vector `q` with `φ(p, s, x) = q · row(x)` for every entity `x`.
    pub fn object_query(&self, p: usize, s: usize) -> Vec<f64> {
        match self {
            Model::HolE(m) => m.object_query(p, s),
            Model::ComplEx(m) => m.object_query(p, s),
        }
    }

    /// Vector `q` with `φ(p, x, o) = q · row(x)` for every entity `x`.
    pub fn subject_query(&self, p: usize, o: usize) -> Vec<f64> {
        match self {
            Model::HolE(m) => m.subject_query(p, o),
            Model::ComplEx(m) => m.subject_query(p, o),
        }
    }

    /// Scores of `(p, s, x)` for every entity `x`.
    pub fn score_all_objects(&self, p: usize, s: usize) -> Vec<f64> {
        let q = self.object_query(p, s);
        self.entities().iter_rows().map(|row| dot(&q, row)).collect()
    }

    /// Scores of `(p, x, o)` for every entity `x`.
    pub fn score_all_subjects(&self, p: usize, o: usize) -> Vec<f64> {
        let q = self.subject_query(p, o);
        self.entities().iter_rows().map(|row| dot(&q, row)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entities().as_slice().iter().all(|v| v.is_finite())
            && self.relations().as_slice().iter().all(|v| v.is_finite())
    }
}

/// `∛(1/2)`, the factor applied to the always-real spectrum slots so the
/// trilinear product counts them once after the `2·Re` folding.
pub fn real_slot_scale() -> f64 {
    0.5_f64.cbrt()
}

/// Compressed complex vector of a real vector: `[c·s(x), x']` for odd `K` and
/// `[c·s(x), c·t(x), x']` for even `K`, where `x'` holds DFT slots
/// `1..⌈K/2⌉-1` and `c = ∛(1/2)`.
pub fn compress_spectrum(x: &[f64]) -> Result<Vec<Complex64>> {
    let k = x.len();
    let spectrum = spectral::dft(x)?;
    let c = real_slot_scale();
    let half = k.div_ceil(2);
    let mut out = Vec::with_capacity(half + 1);
    out.push(Complex64::new(c * spectrum[0].re, 0.0));
    if k.is_multiple_of(2) {
        out.push(Complex64::new(c * spectrum[k / 2].re, 0.0));
    }
    out.extend_from_slice(&spectrum[1..half]);
    Ok(out)
}

/// Rank of the complex model produced by [`hole_to_complex`].
pub fn converted_rank(k: usize) -> usize {
    if k.is_multiple_of(2) {
        k / 2 + 1
    } else {
        k.div_ceil(2)
    }
}

/// Converts a HolE model to a ComplEx model whose scores are proportional:
/// `φ_hole = (2/K)·φ_complex`.
pub fn hole_to_complex(model: &HolEModel) -> Result<ComplExModel> {
    let convert = |table: &ParamTable| -> Result<Vec<Vec<Complex64>>> {
        table.iter_rows().map(compress_spectrum).collect()
    };
    let mut out = ComplExModel::from_rows(&convert(&model.entities)?, &convert(&model.relations)?)?;
    out.seed = model.seed;
    Ok(out)
}

/// The constant `2/K` relating the two scores.
pub fn equivalence_factor(k: usize) -> f64 {
    2.0 / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_hole(r: &[f64], es: &[f64], eo: &[f64]) -> HolEModel {
        HolEModel::from_rows(&[es.to_vec(), eo.to_vec()], &[r.to_vec()]).unwrap()
    }

    #[test]
    fn hole_scalar_case() {
        let m = single_hole(&[2.0], &[3.0], &[4.0]);
        assert_eq!(m.score(0, 0, 1), 24.0);
    }

    #[test]
    fn hole_two_dim() {
        let m = single_hole(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]);
        assert!((m.score_direct(0, 0, 1) - 13.0).abs() < 1e-12);
        assert!((m.score_fourier(0, 0, 1) - 13.0).abs() < 1e-12);
    }

    #[test]
    fn zero_relation_scores_zero() {
        let m = single_hole(&[0.0; 5], &[1.0, -2.0, 3.0, 0.5, 1.0], &[0.3, 0.1, -1.0, 2.0, 0.0]);
        assert_eq!(m.score(0, 0, 1), 0.0);
    }

    #[test]
    fn complex_scalar_cases() {
        let m = ComplExModel::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]], &[vec![c(0.0, 1.0)]])
            .unwrap();
        assert!((m.score(0, 0, 1) - 1.0).abs() < 1e-15);
        assert!((m.score(0, 1, 0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_ids_are_rejected() {
        let m: Model = single_hole(&[1.0], &[1.0], &[1.0]).into();
        assert!(matches!(m.score(1, 0, 0), Err(Error::InvalidArgument(_))));
        assert!(m.score(0, 2, 0).is_err());
        assert!(m.grad_score(1.0, 0, 0, 5).is_err());
    }

    #[test]
    fn conversion_examples() {
        let cst = real_slot_scale();
        let x = compress_spectrum(&[1.0, 2.0]).unwrap();
        assert!((x[0] - c(3.0 * cst, 0.0)).norm() < 1e-12);
        assert!((x[1] - c(-cst, 0.0)).norm() < 1e-12);

        let m = single_hole(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]);
        let conv = hole_to_complex(&m).unwrap();
        assert_eq!(conv.rank(), 2);
        assert!((equivalence_factor(2) * conv.score(0, 0, 1) - 13.0).abs() < 1e-12);

        let (a, b, d) = (1.5, -0.7, 2.2);
        let m = single_hole(&[a], &[b], &[d]);
        let conv = hole_to_complex(&m).unwrap();
        assert_eq!(conv.rank(), 1);
        assert!((conv.entity(0)[0].re - cst * b).abs() < 1e-15);
        assert!((2.0 * conv.score(0, 0, 1) - a * b * d).abs() < 1e-12);
    }

    #[test]
    fn converted_ranks() {
        assert_eq!(converted_rank(1), 1);
        assert_eq!(converted_rank(2), 2);
        assert_eq!(converted_rank(3), 2);
        assert_eq!(converted_rank(8), 5);
        assert_eq!(converted_rank(9), 5);
    }

    #[test]
    fn zero_weight_gradient_is_empty() {
        let m = Model::init(ModelKind::ComplEx, 3, 1, 2, 1).unwrap();
        assert!(m.grad_score(0.0, 0, 1, 2).unwrap().is_empty());
    }

    #[test]
    fn complex_grad_wrt_real_relation_part() {
        let one = vec![c(1.0, 0.0)];
        let m: Model = ComplExModel::from_rows(&[one.clone(), one.clone()], &[one]).unwrap().into();
        let g = m.grad_score(1.0, 0, 0, 1).unwrap();
        assert_eq!(g.get(ParamKind::Relation, 0).unwrap()[0], 1.0);
    }

    #[test]
    fn init_is_seeded() {
        let a = Model::init(ModelKind::HolE, 4, 2, 3, 9).unwrap();
        let b = Model::init(ModelKind::HolE, 4, 2, 3, 9).unwrap();
        let d = Model::init(ModelKind::HolE, 4, 2, 3, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
        assert!(Model::init(ModelKind::ComplEx, 0, 1, 1, 0).is_err());
        assert!(Model::init(ModelKind::HolE, 1, 1, 0, 0).is_err());
    }

    #[test]
    fn init_mean_is_near_zero() {
        let m = Model::init(ModelKind::HolE, 1000, 1, 100, 3).unwrap();
        let vals = m.entities().as_slice();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        let var = vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64;
        assert!((var - 0.01).abs() < 0.001, "variance {var}");
    }

    #[test]
    fn query_vectors_reproduce_scores() {
        for kind in [ModelKind::HolE, ModelKind::ComplEx] {
            let m = Model::init(kind, 6, 2, 5, 4).unwrap();
            let objs = m.score_all_objects(1, 2);
            let subs = m.score_all_subjects(0, 3);
            for x in 0..6 {
                assert!((objs[x] - m.score(1, 2, x).unwrap()).abs() < 1e-12);
                assert!((subs[x] - m.score(0, x, 3).unwrap()).abs() < 1e-12);
            }
        }
    }
}
