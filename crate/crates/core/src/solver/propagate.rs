//! Exact interval bound propagation over linear rows.

use crate::model::{Comparator, LinearConstraint};

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Tightens `Σ sign·a·x ≤ sign·rhs`; returns false on proven infeasibility.
fn tighten_le(terms: &[(crate::model::VarId, i64)], sign: i64, rhs: i64, lo: &mut [i64], hi: &mut [i64], changed: &mut bool) -> bool {
    let rhs = sign as i128 * rhs as i128;
    let mut minact: i128 = 0;
    for (v, a) in terms {
        let a = (sign * a) as i128;
        minact += if a > 0 { a * lo[v.idx()] as i128 } else { a * hi[v.idx()] as i128 };
    }
    if minact > rhs {
        return false;
    }
    for (v, a) in terms {
        let a = (sign * a) as i128;
        let j = v.idx();
        if a == 0 {
            continue;
        }
        let own = if a > 0 { a * lo[j] as i128 } else { a * hi[j] as i128 };
        let slack = rhs - (minact - own);
        if a > 0 {
            let bound = div_floor(slack, a);
            if bound < hi[j] as i128 {
                hi[j] = bound.max(i64::MIN as i128) as i64;
                *changed = true;
            }
        } else {
            let bound = div_ceil(slack, a);
            if bound > lo[j] as i128 {
                lo[j] = bound.min(i64::MAX as i128) as i64;
                *changed = true;
            }
        }
        if lo[j] > hi[j] {
            return false;
        }
    }
    true
}

/// Propagates every row to a fixpoint (bounded rounds); false means the box holds no solution.
pub(crate) fn propagate(rows: &[LinearConstraint], lo: &mut [i64], hi: &mut [i64]) -> bool {
    if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
        return false;
    }
    for _ in 0..64 {
        let mut changed = false;
        for row in rows {
            let ok = match row.cmp {
                Comparator::Le => tighten_le(&row.terms, 1, row.rhs, lo, hi, &mut changed),
                Comparator::Ge => tighten_le(&row.terms, -1, row.rhs, lo, hi, &mut changed),
                Comparator::Eq => {
                    tighten_le(&row.terms, 1, row.rhs, lo, hi, &mut changed)
                        && tighten_le(&row.terms, -1, row.rhs, lo, hi, &mut changed)
                }
            };
            if !ok {
                return false;
            }
        }
        if !changed {
            break;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarId;

    #[test]
    fn rounding_helpers() {
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_ceil(7, 2), 4);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, -2), -3);
    }

    #[test]
    fn coverage_forces_purchase_and_indicator() {
        let (q, b, s) = (VarId(0), VarId(1), VarId(2));
        let rows = vec![
            LinearConstraint::new("stock", vec![(s, 1)], Comparator::Le, 4),
            LinearConstraint::new("cover", vec![(s, 1), (q, 1)], Comparator::Ge, 10),
            LinearConstraint::new("max", vec![(q, 1), (b, -20)], Comparator::Le, 0),
            LinearConstraint::new("min", vec![(q, -1), (b, 5)], Comparator::Le, 0),
        ];
        let mut lo = vec![0, 0, 0];
        let mut hi = vec![20, 1, 10];
        assert!(propagate(&rows, &mut lo, &mut hi));
        assert_eq!(lo, vec![6, 1, 0]);
        assert_eq!(hi, vec![20, 1, 4]);
    }

    #[test]
    fn detects_infeasibility() {
        let rows = vec![LinearConstraint::new("c", vec![(VarId(0), 1)], Comparator::Ge, 30)];
        assert!(!propagate(&rows, &mut [0], &mut [24]));
    }
}
