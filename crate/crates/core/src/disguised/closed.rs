//! Closed-form membership for the rectangle family.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Whether the rectangle system with corner rates `k` has a complex balanced
/// realization. `strict` asks for one on the complete graph of the corners
/// with every rate positive; otherwise subgraphs are allowed.
///
/// With `r = k1 k3 / (k2 k4)` and `s = ((alpha - beta)/(alpha + beta))^2` the
/// condition is `s < r < 1/s` (strict) or `s <= r <= 1/s`. Equal shifts
/// always succeed; a shift along one axis only leaves `k1 k3 = k2 k4`.
pub fn disguised_membership_rectangle(k: &[Q], alpha: &Q, beta: &Q, strict: bool) -> Result<bool> {
    if k.len() != 4 {
        return Err(Error::Rates(format!(
            "four corner rates expected, got {}",
            k.len()
        )));
    }
    if k.iter().any(|x| !x.is_positive()) {
        return Err(Error::Rates("corner rates must be positive".into()));
    }
    if alpha.is_negative() || beta.is_negative() {
        return Err(Error::Unsupported(
            "shift fractions must be nonnegative".into(),
        ));
    }
    if alpha.is_zero() && beta.is_zero() {
        return Err(Error::Unsupported(
            "alpha = beta = 0 gives no reactions".into(),
        ));
    }
    if alpha == beta {
        return Ok(true);
    }
    let lhs = &k[0] * &k[2];
    let rhs = &k[1] * &k[3];
    if alpha.is_zero() || beta.is_zero() {
        return Ok(lhs == rhs);
    }
    let r = lhs / rhs;
    let d = alpha - beta;
    let s = alpha + beta;
    let lo = (&d * &d) / (&s * &s);
    let hi = (&s * &s) / (&d * &d);
    Ok(if strict {
        lo < r && r < hi
    } else {
        lo <= r && r <= hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn ks(v: [i64; 4]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn bounds() {
        assert!(disguised_membership_rectangle(&ks([1, 1, 1, 1]), &q(2), &q(1), true).unwrap());
        assert!(!disguised_membership_rectangle(&ks([10, 1, 10, 1]), &q(2), &q(1), true).unwrap());
        // exactly on the bound: closed only
        assert!(!disguised_membership_rectangle(&ks([9, 1, 1, 1]), &q(2), &q(1), true).unwrap());
        assert!(disguised_membership_rectangle(&ks([9, 1, 1, 1]), &q(2), &q(1), false).unwrap());
        assert!(
            disguised_membership_rectangle(&ks([100, 1, 1, 1]), &qr(1, 3), &qr(1, 3), true)
                .unwrap()
        );
        assert!(disguised_membership_rectangle(&ks([2, 1, 3, 6]), &q(0), &q(1), true).unwrap());
        assert!(!disguised_membership_rectangle(&ks([2, 1, 3, 5]), &q(0), &q(1), false).unwrap());
        assert!(disguised_membership_rectangle(&ks([1, 1, 1, 1]), &q(0), &q(0), true).is_err());
    }
}
