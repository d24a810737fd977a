use super::BoostError;

/// Area under the ROC curve via the rank-sum statistic with mid-ranks,
/// equal to `P(s+ > s-) + P(s+ = s-) / 2`.
///
/// The numerator is kept in integers (ranks doubled) so the only rounding is
/// the final division.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, BoostError> {
    if scores.len() != labels.len() {
        return Err(BoostError::LengthMismatch {
            rows: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(BoostError::NotANumber);
    }
    let n_pos = labels.iter().filter(|l| **l).count() as u128;
    let n_neg = labels.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(BoostError::SingleClass {
            n: labels.len(),
            positives: n_pos as usize,
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum over positives of 2 * midrank (1-based)
    let mut doubled_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end, doubled midrank = start + 1 + end
        let doubled_mid = (start + 1 + end) as u128;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i]).count() as u128;
        doubled_rank_sum += doubled_mid * pos_in_group;
        start = end;
    }
    let numerator = doubled_rank_sum - n_pos * (n_pos + 1);
    Ok(numerator as f64 / (2 * n_pos * n_neg) as f64)
}

/// ROC points `(fpr, tpr)` from the strictest threshold to the loosest.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>, BoostError> {
    if scores.len() != labels.len() {
        return Err(BoostError::LengthMismatch {
            rows: scores.len(),
            labels: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|l| **l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(BoostError::SingleClass {
            n: labels.len(),
            positives: n_pos,
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    Ok(points)
}
