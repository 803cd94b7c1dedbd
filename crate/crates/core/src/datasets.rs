//! Triple stores: loading tab-separated benchmark files, the synthetic
//! symmetric/antisymmetric tensor with its cross-validation folds, and a
//! planted low-rank graph generator for desk-scale link prediction runs.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truth value of a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    fn from_sign(sign: bool) -> Self {
        if sign {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledTriple {
    pub p: usize,
    pub s: usize,
    pub o: usize,
    pub y: Label,
}

impl LabeledTriple {
    pub fn positive(p: usize, s: usize, o: usize) -> Self {
        LabeledTriple {
            p,
            s,
            o,
            y: Label::Positive,
        }
    }

    pub fn negative(p: usize, s: usize, o: usize) -> Self {
        LabeledTriple {
            p,
            s,
            o,
            y: Label::Negative,
        }
    }

    pub fn key(&self) -> (usize, usize, usize) {
        (self.p, self.s, self.o)
    }
}

/// Bidirectional string ↔ dense id map, ids assigned in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocab {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names(names: impl IntoIterator<Item = String>) -> Self {
        let mut v = Vocab::new();
        for n in names {
            v.intern(&n);
        }
        v
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleStore {
    pub entities: Vocab,
    pub relations: Vocab,
    train: Vec<LabeledTriple>,
    valid: Vec<LabeledTriple>,
    test: Vec<LabeledTriple>,
    known_true: HashSet<(usize, usize, usize)>,
}

impl TripleStore {
    /// Builds a store, dropping duplicate triples within each split. Returns
    /// the store and the number of duplicates dropped per split.
    pub fn new(
        entities: Vocab,
        relations: Vocab,
        train: Vec<LabeledTriple>,
        valid: Vec<LabeledTriple>,
        test: Vec<LabeledTriple>,
    ) -> Result<(Self, [usize; 3])> {
        let (ne, nr) = (entities.len(), relations.len());
        let mut dropped = [0; 3];
        let mut splits = [train, valid, test];
        for (split, count) in splits.iter_mut().zip(dropped.iter_mut()) {
            let mut seen = HashSet::with_capacity(split.len());
            for t in split.iter() {
                if t.p >= nr || t.s >= ne || t.o >= ne {
                    return Err(Error::invalid(format!(
                        "triple ({}, {}, {}) out of range for {nr} relations and {ne} entities",
                        t.p, t.s, t.o
                    )));
                }
            }
            let before = split.len();
            split.retain(|t| seen.insert(t.key()));
            *count = before - split.len();
        }
        let [train, valid, test] = splits;
        let known_true = train
            .iter()
            .chain(&valid)
            .chain(&test)
            .filter(|t| t.y == Label::Positive)
            .map(LabeledTriple::key)
            .collect();
        Ok((
            TripleStore {
                entities,
                relations,
                train,
                valid,
                test,
                known_true,
            },
            dropped,
        ))
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn split(&self, split: Split) -> &[LabeledTriple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn train(&self) -> &[LabeledTriple] {
        &self.train
    }

    pub fn valid(&self) -> &[LabeledTriple] {
        &self.valid
    }

    pub fn test(&self) -> &[LabeledTriple] {
        &self.test
    }

    /// Whether `(p, s, o)` is a positive triple in any split.
    pub fn is_known_true(&self, p: usize, s: usize, o: usize) -> bool {
        self.known_true.contains(&(p, s, o))
    }

    pub fn known_true_len(&self) -> usize {
        self.known_true.len()
    }

    pub fn contains(&self, split: Split, p: usize, s: usize, o: usize) -> bool {
        self.split(split)
            .iter()
            .any(|t| t.p == p && t.s == s && t.o == o)
    }

    /// Writes one split as tab-separated `subject relation object` lines,
    /// with a trailing `1`/`-1` column when `with_labels` is set.
    pub fn write_tsv(&self, split: Split, path: impl AsRef<Path>, with_labels: bool) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for t in self.split(split) {
            let s = self.entities.name(t.s).expect("dense ids");
            let p = self.relations.name(t.p).expect("dense ids");
            let o = self.entities.name(t.o).expect("dense ids");
            if with_labels {
                let _ = writeln!(out, "{s}\t{p}\t{o}\t{}", t.y.sign() as i32);
            } else {
                let _ = writeln!(out, "{s}\t{p}\t{o}");
            }
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub n_entities: usize,
    pub n_relations: usize,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub duplicates_dropped: usize,
    /// Entities that occur in the test file but in neither train nor valid.
    pub test_only_entities: usize,
}

struct RawLine {
    s: String,
    p: String,
    o: String,
    y: Label,
}

fn parse_file(path: &Path) -> Result<Vec<RawLine>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_err = |message: String| Error::Parse {
            path: PathBuf::from(path),
            line: idx + 1,
            message,
        };
        let y = match fields.len() {
            3 => Label::Positive,
            4 => match fields[3].trim() {
                "1" | "+1" => Label::Positive,
                "-1" => Label::Negative,
                other => return Err(parse_err(format!("bad label {other:?}"))),
            },
            n => return Err(parse_err(format!("expected 3 tab-separated fields, found {n}"))),
        };
        if fields[..3].iter().any(|f| f.is_empty()) {
            return Err(parse_err("empty field".into()));
        }
        out.push(RawLine {
            s: fields[0].to_owned(),
            p: fields[1].to_owned(),
            o: fields[2].to_owned(),
            y,
        });
    }
    Ok(out)
}

/// Loads train/valid/test files of `subject<TAB>relation<TAB>object` lines.
/// An optional fourth column carries a `1`/`-1` label.
pub fn load_tsv(
    train: impl AsRef<Path>,
    valid: impl AsRef<Path>,
    test: impl AsRef<Path>,
) -> Result<(TripleStore, LoadReport)> {
    let raw = [
        parse_file(train.as_ref())?,
        parse_file(valid.as_ref())?,
        parse_file(test.as_ref())?,
    ];
    let mut entities = Vocab::new();
    let mut relations = Vocab::new();
    let mut splits: [Vec<LabeledTriple>; 3] = Default::default();
    let mut seen_before_test = 0;
    for (i, lines) in raw.iter().enumerate() {
        if i == 2 {
            seen_before_test = entities.len();
        }
        splits[i] = lines
            .iter()
            .map(|l| LabeledTriple {
                s: entities.intern(&l.s),
                p: relations.intern(&l.p),
                o: entities.intern(&l.o),
                y: l.y,
            })
            .collect();
    }
    let [tr, va, te] = splits;
    let (store, dropped) = TripleStore::new(entities, relations, tr, va, te)?;
    let report = LoadReport {
        n_entities: store.n_entities(),
        n_relations: store.n_relations(),
        train: store.train.len(),
        valid: store.valid.len(),
        test: store.test.len(),
        duplicates_dropped: dropped.iter().sum(),
        test_only_entities: store.n_entities() - seen_before_test,
    };
    Ok((store, report))
}

/// Parameters of the joint symmetric/antisymmetric tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub seed: u64,
    pub folds: usize,
    pub valid_fold: usize,
    pub test_fold: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n: 50,
            seed: 0,
            folds: 5,
            valid_fold: 1,
            test_fold: 0,
        }
    }
}

pub const SYMMETRIC_RELATION: usize = 0;
pub const ANTISYMMETRIC_RELATION: usize = 1;

/// Two relations over `n` entities. Relation 0 is symmetric and relation 1
/// antisymmetric. Strictly-upper cells get i.i.d. uniform ±1 labels and
/// always go to train; the diagonal is never observed; the strictly-lower
/// cells of both relations are shuffled into `folds` folds, one for
/// validation, one for test and the rest for train.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TripleStore> {
    let SyntheticSpec {
        n,
        seed,
        folds,
        valid_fold,
        test_fold,
    } = *spec;
    if n < 2 {
        return Err(Error::invalid(format!("synthetic tensor needs n ≥ 2, got {n}")));
    }
    if folds < 2 || valid_fold >= folds || test_fold >= folds || valid_fold == test_fold {
        return Err(Error::invalid(format!(
            "fold indices must be distinct and below the fold count (folds={folds}, valid={valid_fold}, test={test_fold})"
        )));
    }

    let mut label_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_rng = ChaCha8Rng::seed_from_u64(seed);
    fold_rng.set_stream(1);

    let mut train = Vec::new();
    let mut lower = Vec::new();
    for p in [SYMMETRIC_RELATION, ANTISYMMETRIC_RELATION] {
        for s in 0..n {
            for o in s + 1..n {
                let y = Label::from_sign(label_rng.random_bool(0.5));
                train.push(LabeledTriple { p, s, o, y });
                let mirrored = if p == SYMMETRIC_RELATION { y } else { y.flip() };
                lower.push(LabeledTriple {
                    p,
                    s: o,
                    o: s,
                    y: mirrored,
                });
            }
        }
    }
    lower.shuffle(&mut fold_rng);

    let mut valid = Vec::new();
    let mut test = Vec::new();
    let len = lower.len();
    for (i, t) in lower.into_iter().enumerate() {
        let fold = i * folds / len;
        if fold == valid_fold {
            valid.push(t);
        } else if fold == test_fold {
            test.push(t);
        } else {
            train.push(t);
        }
    }

    let entities = Vocab::from_names((0..n).map(|i| format!("e{i}")));
    let relations = Vocab::from_names(["symmetric".to_owned(), "antisymmetric".to_owned()]);
    Ok(TripleStore::new(entities, relations, train, valid, test)?.0)
}

/// All rotations of the cross-validation: rotation `i` tests on fold `i` and
/// validates on fold `i + 1 (mod folds)`. Labels are identical across
/// rotations.
pub fn cv_rotate(spec: &SyntheticSpec) -> Result<Vec<TripleStore>> {
    (0..spec.folds)
        .map(|i| {
            generate_synthetic(&SyntheticSpec {
                test_fold: i,
                valid_fold: (i + 1) % spec.folds,
                ..*spec
            })
        })
        .collect()
}

/// Parameters for a graph whose triples come from a hidden low-rank complex
/// model, with per-relation type constraints and fan-out. Used as a stand-in
/// for benchmark-style data when the benchmark files are not at hand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedGraphSpec {
    pub n_entities: usize,
    pub n_relations: usize,
    pub latent_rank: usize,
    pub seed: u64,
    pub valid_fraction: f64,
    pub test_fraction: f64,
}

impl Default for PlantedGraphSpec {
    fn default() -> Self {
        PlantedGraphSpec {
            n_entities: 2000,
            n_relations: 50,
            latent_rank: 8,
            seed: 0,
            valid_fraction: 0.1,
            test_fraction: 0.1,
        }
    }
}

/// Generates a planted graph. Each relation draws a random head set and a
/// random candidate tail pool (its "type"); every head links to its top-m
/// tails under the hidden score, with `m` fixed per relation from
/// `{1, 2, 4, 8}`. Valid/test triples whose entities never occur in train
/// are moved back to train.
pub fn generate_planted_graph(spec: &PlantedGraphSpec) -> Result<TripleStore> {
    let PlantedGraphSpec {
        n_entities,
        n_relations,
        latent_rank,
        seed,
        valid_fraction,
        test_fraction,
    } = *spec;
    if n_entities < 20 || n_relations == 0 || latent_rank == 0 {
        return Err(Error::invalid("planted graph needs ≥ 20 entities, ≥ 1 relation and rank ≥ 1"));
    }
    if !(0.0..1.0).contains(&(valid_fraction + test_fraction)) || valid_fraction < 0.0 || test_fraction < 0.0 {
        return Err(Error::invalid("valid and test fractions must be nonnegative and sum below 1"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian_row = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..latent_rank)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect()
    };
    let ent: Vec<Vec<Complex64>> = (0..n_entities).map(|_| gaussian_row(&mut rng)).collect();
    let rel: Vec<Vec<Complex64>> = (0..n_relations).map(|_| gaussian_row(&mut rng)).collect();
    let hidden = |p: usize, s: usize, o: usize| -> f64 {
        rel[p]
            .iter()
            .zip(&ent[s])
            .zip(&ent[o])
            .map(|((r, a), b)| (r * a * b.conj()).re)
            .sum()
    };

    let all: Vec<usize> = (0..n_entities).collect();
    let mut triples = Vec::new();
    for p in 0..n_relations {
        let fan_out = [1, 2, 4, 8][rng.random_range(0..4)];
        let n_heads = rng.random_range(n_entities / 20..=n_entities / 4).max(2);
        let pool_size = rng.random_range(n_entities / 20..=n_entities / 5).max(fan_out + 1);
        let heads: Vec<usize> = all.choose_multiple(&mut rng, n_heads).copied().collect();
        let pool: Vec<usize> = all.choose_multiple(&mut rng, pool_size).copied().collect();
        for &s in &heads {
            let mut scored: Vec<(f64, usize)> = pool
                .iter()
                .filter(|&&o| o != s)
                .map(|&o| (hidden(p, s, o), o))
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            triples.extend(
                scored
                    .iter()
                    .take(fan_out)
                    .map(|&(_, o)| LabeledTriple::positive(p, s, o)),
            );
        }
    }
    triples.shuffle(&mut rng);

    let n_valid = (triples.len() as f64 * valid_fraction).round() as usize;
    let n_test = (triples.len() as f64 * test_fraction).round() as usize;
    let held = triples.split_off(triples.len() - n_valid - n_test);
    let mut train = triples;
    let mut seen_e: HashSet<usize> = train.iter().flat_map(|t| [t.s, t.o]).collect();
    let mut seen_r: HashSet<usize> = train.iter().map(|t| t.p).collect();
    let (mut valid, mut test) = (Vec::new(), Vec::new());
    for (i, t) in held.into_iter().enumerate() {
        if !(seen_e.contains(&t.s) && seen_e.contains(&t.o) && seen_r.contains(&t.p)) {
            seen_e.extend([t.s, t.o]);
            seen_r.insert(t.p);
            train.push(t);
        } else if i < n_valid {
            valid.push(t);
        } else {
            test.push(t);
        }
    }

    let entities = Vocab::from_names((0..n_entities).map(|i| format!("e{i}")));
    let relations = Vocab::from_names((0..n_relations).map(|i| format!("r{i}")));
    Ok(TripleStore::new(entities, relations, train, valid, test)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn load_counts() {
        let dir = tempfile::tempdir().unwrap();
        let tr = write(dir.path(), "train", "a\tr\tb\nb\tr\tc\n");
        let va = write(dir.path(), "valid", "");
        let te = write(dir.path(), "test", "");
        let (store, report) = load_tsv(&tr, &va, &te).unwrap();
        assert_eq!((store.n_entities(), store.n_relations(), store.train().len()), (3, 1, 2));
        assert_eq!(report.duplicates_dropped, 0);
        assert_eq!(store.entities.id("c"), Some(2));
    }

    #[test]
    fn duplicates_are_dropped_and_counted() {
        let dir = tempfile::tempdir().unwrap();
        let tr = write(dir.path(), "train", "a\tr\tb\na\tr\tb\n");
        let va = write(dir.path(), "valid", "a\tr\tb\n");
        let te = write(dir.path(), "test", "z\tr\ta\n");
        let (store, report) = load_tsv(&tr, &va, &te).unwrap();
        assert_eq!(store.train().len(), 1);
        assert_eq!(report.duplicates_dropped, 1);
        assert_eq!(report.test_only_entities, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let tr = write(dir.path(), "train", "a\tr\tb\nbroken line\n");
        let va = write(dir.path(), "valid", "");
        let te = write(dir.path(), "test", "");
        match load_tsv(&tr, &va, &te) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope");
        let err = load_tsv(&missing, &missing, &missing).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn synthetic_sizes() {
        let store = generate_synthetic(&SyntheticSpec::default()).unwrap();
        assert_eq!(store.train().len(), 3920);
        assert_eq!(store.valid().len(), 490);
        assert_eq!(store.test().len(), 490);
        assert!(store
            .train()
            .iter()
            .chain(store.valid())
            .chain(store.test())
            .all(|t| t.s != t.o));
    }

    #[test]
    fn synthetic_pattern_holds() {
        let store = generate_synthetic(&SyntheticSpec { seed: 3, ..Default::default() }).unwrap();
        let mut labels = HashMap::new();
        for t in store.train().iter().chain(store.valid()).chain(store.test()) {
            labels.insert(t.key(), t.y.sign());
        }
        assert_eq!(labels.len(), 2 * 50 * 49);
        for (&(p, s, o), &y) in &labels {
            let mirrored = labels[&(p, o, s)];
            if p == SYMMETRIC_RELATION {
                assert_eq!(y, mirrored);
            } else {
                assert_eq!(y, -mirrored);
            }
        }
    }

    #[test]
    fn synthetic_rejects_bad_specs() {
        assert!(generate_synthetic(&SyntheticSpec { n: 1, ..Default::default() }).is_err());
        assert!(generate_synthetic(&SyntheticSpec { valid_fold: 0, test_fold: 0, ..Default::default() }).is_err());
        assert!(generate_synthetic(&SyntheticSpec { test_fold: 5, ..Default::default() }).is_err());
    }

    #[test]
    fn export_round_trip_keeps_labels() {
        let dir = tempfile::tempdir().unwrap();
        let store = generate_synthetic(&SyntheticSpec { n: 6, ..Default::default() }).unwrap();
        let paths: Vec<PathBuf> = Split::ALL
            .iter()
            .map(|&s| {
                let p = dir.path().join(format!("{s:?}.tsv"));
                store.write_tsv(s, &p, true).unwrap();
                p
            })
            .collect();
        let (back, _) = load_tsv(&paths[0], &paths[1], &paths[2]).unwrap();
        for split in Split::ALL {
            let names = |st: &TripleStore, t: &LabeledTriple| {
                (
                    st.entities.name(t.s).unwrap().to_owned(),
                    st.relations.name(t.p).unwrap().to_owned(),
                    st.entities.name(t.o).unwrap().to_owned(),
                    t.y,
                )
            };
            let a: Vec<_> = store.split(split).iter().map(|t| names(&store, t)).collect();
            let b: Vec<_> = back.split(split).iter().map(|t| names(&back, t)).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn planted_graph_is_consistent() {
        let spec = PlantedGraphSpec {
            n_entities: 200,
            n_relations: 5,
            seed: 1,
            ..Default::default()
        };
        let a = generate_planted_graph(&spec).unwrap();
        let b = generate_planted_graph(&spec).unwrap();
        assert_eq!(a, b);
        assert!(!a.valid().is_empty() && !a.test().is_empty());
        let train_entities: HashSet<usize> = a.train().iter().flat_map(|t| [t.s, t.o]).collect();
        assert!(a.test().iter().all(|t| train_entities.contains(&t.s) && train_entities.contains(&t.o)));
    }
}
