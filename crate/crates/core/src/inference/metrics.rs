use std::collections::HashSet;

/// Average precision of a ranked list: mean over relevant items of the
/// precision at each relevant hit. Relevant items never retrieved count as
/// zero-precision hits. `NaN` when `relevant` is empty.
pub fn average_precision(ranked: &[(String, f64)], relevant: &HashSet<String>) -> f64 {
    if relevant.is_empty() {
        return f64::NAN;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, (item, _)) in ranked.iter().enumerate() {
        if relevant.contains(item) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len() as f64
}

/// ROC AUC: probability that a random positive outscores a random negative,
/// ties counting one half. `NaN` without both classes.
pub fn auc(scored: &[(f64, bool)]) -> f64 {
    let positives = scored.iter().filter(|(_, y)| *y).count();
    let negatives = scored.len() - positives;
    if positives == 0 || negatives == 0 {
        return f64::NAN;
    }
    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Mann-Whitney U with midranks for ties.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].0 == sorted[i].0 {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += midrank * sorted[i..=j].iter().filter(|(_, y)| *y).count() as f64;
        i = j + 1;
    }
    let p = positives as f64;
    (rank_sum - p * (p + 1.0) / 2.0) / (p * negatives as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankMetrics {
    pub map: f64,
    pub auc: f64,
}

/// Average precision and AUC of one ranked answer list. Unranked items count
/// as negatives; relevant items missing from the list score below everything.
pub fn rank_metrics(predicted: &[(String, f64)], relevant: &HashSet<String>) -> RankMetrics {
    let mut scored: Vec<(f64, bool)> = predicted
        .iter()
        .map(|(a, s)| (*s, relevant.contains(a)))
        .collect();
    let seen: HashSet<&str> = predicted.iter().map(|(a, _)| a.as_str()).collect();
    scored.extend(
        relevant
            .iter()
            .filter(|r| !seen.contains(r.as_str()))
            .map(|_| (f64::NEG_INFINITY, true)),
    );
    RankMetrics {
        map: average_precision(predicted, relevant),
        auc: auc(&scored),
    }
}

/// Mean of per-query average precision, skipping queries without relevant items.
pub fn mean_average_precision<'a>(
    queries: impl IntoIterator<Item = (&'a [(String, f64)], &'a HashSet<String>)>,
) -> f64 {
    let aps: Vec<f64> = queries
        .into_iter()
        .filter(|(_, rel)| !rel.is_empty())
        .map(|(ranked, rel)| average_precision(ranked, rel))
        .collect();
    if aps.is_empty() {
        f64::NAN
    } else {
        aps.iter().sum::<f64>() / aps.len() as f64
    }
}
