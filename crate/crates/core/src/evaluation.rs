//! Link-prediction ranking metrics and average precision.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{Label, LabeledTriple, TripleStore};
use crate::error::{Error, Result};
use crate::models::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    Raw,
    Filtered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Subject,
    Object,
}

pub const HITS_AT: [usize; 3] = [1, 3, 10];

/// Rank of the true entity among `scores`. Ties with other candidates count
/// half, rounded up; candidates for which `skip` holds are ignored. A NaN
/// candidate counts as outranking the true entity, and a NaN true score
/// ranks last.
pub fn rank_from_scores(scores: &[f64], truth: usize, skip: impl Fn(usize) -> bool) -> usize {
    let target = scores[truth];
    let mut higher = 0;
    let mut ties = 0usize;
    let mut considered = 0;
    for (cand, &score) in scores.iter().enumerate() {
        if cand == truth || skip(cand) {
            continue;
        }
        considered += 1;
        if score.is_nan() || score > target {
            higher += 1;
        } else if score == target {
            ties += 1;
        }
    }
    if target.is_nan() {
        return 1 + considered;
    }
    1 + higher + ties.div_ceil(2)
}

fn ranks_for_side(
    model: &Model,
    t: &LabeledTriple,
    store: &TripleStore,
    side: Side,
) -> (usize, usize) {
    let (scores, truth) = match side {
        Side::Object => (model.score_all_objects(t.p, t.s), t.o),
        Side::Subject => (model.score_all_subjects(t.p, t.o), t.s),
    };
    let raw = rank_from_scores(&scores, truth, |_| false);
    let filtered = rank_from_scores(&scores, truth, |cand| match side {
        Side::Object => store.is_known_true(t.p, t.s, cand),
        Side::Subject => store.is_known_true(t.p, cand, t.o),
    });
    (raw, filtered)
}

/// Rank of `triple` against every corruption of one side. In filtered mode,
/// corruptions that are themselves known-true triples are skipped.
pub fn rank_triple(
    model: &Model,
    triple: &LabeledTriple,
    store: &TripleStore,
    mode: RankMode,
    side: Side,
) -> Result<usize> {
    model.check_ids(triple.p, triple.s, triple.o)?;
    if model.n_entities() != store.n_entities() {
        return Err(Error::invalid("model and store disagree on the entity count"));
    }
    if !store.is_known_true(triple.p, triple.s, triple.o) {
        return Err(Error::invalid(format!(
            "triple ({}, {}, {}) is not a known positive",
            triple.p, triple.s, triple.o
        )));
    }
    let (raw, filtered) = ranks_for_side(model, triple, store, side);
    Ok(match mode {
        RankMode::Raw => raw,
        RankMode::Filtered => filtered,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMetrics {
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
}

/// Mean reciprocal rank and Hits@{1,3,10} of a pooled list of ranks.
pub fn mrr_and_hits(ranks: &[usize]) -> Result<RankMetrics> {
    if ranks.is_empty() {
        return Err(Error::invalid("no ranks to summarize"));
    }
    if ranks.contains(&0) {
        return Err(Error::invalid("ranks start at 1"));
    }
    let n = ranks.len() as f64;
    let mrr = ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n;
    let hits = HITS_AT
        .iter()
        .map(|&k| (k, ranks.iter().filter(|&&r| r <= k).count() as f64 / n))
        .collect();
    Ok(RankMetrics { mrr, hits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleRanks {
    pub subject_raw: usize,
    pub subject_filtered: usize,
    pub object_raw: usize,
    pub object_filtered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub mrr_raw: f64,
    pub mrr_filtered: f64,
    /// Filtered Hits@N.
    pub hits: BTreeMap<usize, f64>,
    pub ranks: Vec<TripleRanks>,
}

/// Ranks every positive triple of `triples` on both sides and pools the
/// subject-side and object-side ranks.
pub fn evaluate_ranking(
    model: &Model,
    store: &TripleStore,
    triples: &[LabeledTriple],
) -> Result<RankingReport> {
    let positives: Vec<&LabeledTriple> = triples.iter().filter(|t| t.y == Label::Positive).collect();
    if positives.is_empty() {
        return Err(Error::invalid("no positive triples to rank"));
    }
    if model.n_entities() != store.n_entities() {
        return Err(Error::invalid("model and store disagree on the entity count"));
    }
    for t in &positives {
        model.check_ids(t.p, t.s, t.o)?;
    }
    let ranks: Vec<TripleRanks> = positives
        .par_iter()
        .map(|t| {
            let (subject_raw, subject_filtered) = ranks_for_side(model, t, store, Side::Subject);
            let (object_raw, object_filtered) = ranks_for_side(model, t, store, Side::Object);
            TripleRanks {
                subject_raw,
                subject_filtered,
                object_raw,
                object_filtered,
            }
        })
        .collect();
    let raw: Vec<usize> = ranks.iter().flat_map(|r| [r.subject_raw, r.object_raw]).collect();
    let filtered: Vec<usize> = ranks
        .iter()
        .flat_map(|r| [r.subject_filtered, r.object_filtered])
        .collect();
    let raw_m = mrr_and_hits(&raw)?;
    let filt_m = mrr_and_hits(&filtered)?;
    Ok(RankingReport {
        mrr_raw: raw_m.mrr,
        mrr_filtered: filt_m.mrr,
        hits: filt_m.hits,
        ranks,
    })
}

/// Average precision: positives are visited in order of descending score
/// (ties keep input order) and the precision at each one is averaged.
pub fn average_precision(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&l| l == Label::Positive).count();
    if n_pos == 0 {
        return Err(Error::invalid("average precision needs at least one positive"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // NaN sorts last.
    order.sort_by(|&a, &b| match (scores[a].is_nan(), scores[b].is_nan()) {
        (false, false) => scores[b].total_cmp(&scores[a]),
        (x, y) => x.cmp(&y),
    });
    let mut hits = 0usize;
    let mut total = 0.0;
    for (pos, &idx) in order.iter().enumerate() {
        if labels[idx] == Label::Positive {
            hits += 1;
            total += hits as f64 / (pos + 1) as f64;
        }
    }
    Ok(total / n_pos as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub rank: usize,
    /// Relations without a positive among the evaluated cells are absent.
    pub per_relation: BTreeMap<usize, f64>,
    pub overall: f64,
}

/// Average precision of the model's scores on labelled cells, per relation
/// and pooled.
pub fn ap_report(model: &Model, triples: &[LabeledTriple]) -> Result<ApReport> {
    let mut scores = Vec::with_capacity(triples.len());
    for t in triples {
        scores.push(model.score(t.p, t.s, t.o)?);
    }
    let labels: Vec<Label> = triples.iter().map(|t| t.y).collect();
    let overall = average_precision(&scores, &labels)?;

    let mut grouped: BTreeMap<usize, (Vec<f64>, Vec<Label>)> = BTreeMap::new();
    for (t, &sc) in triples.iter().zip(&scores) {
        let entry = grouped.entry(t.p).or_default();
        entry.0.push(sc);
        entry.1.push(t.y);
    }
    let per_relation = grouped
        .into_iter()
        .filter(|(_, (_, l))| l.contains(&Label::Positive))
        .map(|(p, (s, l))| Ok((p, average_precision(&s, &l)?)))
        .collect::<Result<_>>()?;
    Ok(ApReport {
        rank: model.rank(),
        per_relation,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::Vocab;
    use crate::models::HolEModel;

    const P: Label = Label::Positive;
    const N: Label = Label::Negative;

    #[test]
    fn mrr_examples() {
        let m = mrr_and_hits(&[1, 2, 4]).unwrap();
        assert!((m.mrr - 7.0 / 12.0).abs() < 1e-12);
        assert!((m.hits[&1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.hits[&3] - 2.0 / 3.0).abs() < 1e-12);

        let m = mrr_and_hits(&[1, 1, 1]).unwrap();
        assert_eq!(m.mrr, 1.0);
        assert!(m.hits.values().all(|&h| h == 1.0));

        let m = mrr_and_hits(&[10, 10]).unwrap();
        assert_eq!((m.hits[&10], m.hits[&3]), (1.0, 0.0));

        assert!(mrr_and_hits(&[]).is_err());
        assert_eq!(mrr_and_hits(&[4]).unwrap().mrr, 0.25);
    }

    #[test]
    fn ap_examples() {
        let ap = average_precision(&[0.9, 0.8, 0.7], &[P, N, P]).unwrap();
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        assert_eq!(average_precision(&[3.0, 2.0, -1.0, -2.0], &[P, P, N, N]).unwrap(), 1.0);
        assert_eq!(average_precision(&[0.1, 0.5, 0.2], &[P, P, P]).unwrap(), 1.0);
        assert!(average_precision(&[0.1, 0.2], &[N, N]).is_err());
        assert!(average_precision(&[0.1], &[N, P]).is_err());
    }

    #[test]
    fn ap_ties_keep_input_order() {
        assert_eq!(average_precision(&[1.0, 1.0], &[P, N]).unwrap(), 1.0);
        assert_eq!(average_precision(&[1.0, 1.0], &[N, P]).unwrap(), 0.5);
    }

    #[test]
    fn tie_rule() {
        assert_eq!(rank_from_scores(&[5.0, 1.0, 2.0], 0, |_| false), 1);
        for n in 1..8 {
            let scores = vec![0.0; n];
            assert_eq!(rank_from_scores(&scores, 0, |_| false), (n + 1).div_ceil(2));
        }
        assert_eq!(rank_from_scores(&[1.0, f64::NAN, 0.0], 0, |_| false), 2);
        assert_eq!(rank_from_scores(&[f64::NAN, 1.0, 0.0], 0, |_| false), 3);
    }

    /// Three entities, one relation, K = 1: φ(p,s,o) = r·e_s·e_o.
    fn toy() -> (Model, TripleStore) {
        let model: Model = HolEModel::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], &[vec![1.0]])
            .unwrap()
            .into();
        let train = vec![LabeledTriple::positive(0, 0, 2)];
        let test = vec![LabeledTriple::positive(0, 0, 1)];
        let store = TripleStore::new(
            Vocab::from_names(["a", "b", "c"].map(String::from)),
            Vocab::from_names(["r".to_owned()]),
            train,
            vec![],
            test,
        )
        .unwrap()
        .0;
        (model, store)
    }

    #[test]
    fn filtering_removes_known_competitors() {
        let (model, store) = toy();
        let t = store.test()[0];
        // object scores for (r, a, ·): [1, 2, 3]; true object b scores 2,
        // outranked only by c, which is a known train triple.
        assert_eq!(rank_triple(&model, &t, &store, RankMode::Raw, Side::Object).unwrap(), 2);
        assert_eq!(rank_triple(&model, &t, &store, RankMode::Filtered, Side::Object).unwrap(), 1);
        // subject scores for (r, ·, b): [2, 4, 6]; true subject a is last.
        assert_eq!(rank_triple(&model, &t, &store, RankMode::Raw, Side::Subject).unwrap(), 3);
    }

    #[test]
    fn unknown_triple_is_rejected() {
        let (model, store) = toy();
        let t = LabeledTriple::positive(0, 2, 2);
        assert!(rank_triple(&model, &t, &store, RankMode::Raw, Side::Object).is_err());
    }

    #[test]
    fn report_pools_both_sides() {
        let (model, store) = toy();
        let report = evaluate_ranking(&model, &store, store.test()).unwrap();
        assert_eq!(report.ranks.len(), 1);
        assert!((report.mrr_raw - (1.0 / 3.0 + 1.0 / 2.0) / 2.0).abs() < 1e-12);
        assert!((report.mrr_filtered - (1.0 / 3.0 + 1.0) / 2.0).abs() < 1e-12);
        assert!(report.mrr_filtered >= report.mrr_raw);
    }
}
