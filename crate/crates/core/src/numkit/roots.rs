use crate::error::{QetError, Result};

/// Default relative width for [`bisect`].
pub const ROOT_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 400;

/// Interval known to contain a sign change of some function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluates `f` at both ends and checks the sign change.
    pub fn new(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Self> {
        let b = Self {
            lo,
            hi,
            f_lo: f(lo),
            f_hi: f(hi),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lo < self.hi
            && self.f_lo.is_finite()
            && self.f_hi.is_finite()
            && self.f_lo * self.f_hi <= 0.0;
        if ok {
            Ok(())
        } else {
            Err(QetError::Bracket {
                lo: self.lo,
                hi: self.hi,
                f_lo: self.f_lo,
                f_hi: self.f_hi,
            })
        }
    }
}

/// Bisection until `hi - lo <= tol * max(|lo|, |hi|)` (absolute `tol` near zero).
pub fn bisect(f: impl Fn(f64) -> f64, bracket: Bracket, tol: f64) -> Result<f64> {
    bracket.validate()?;
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        f_hi,
    } = bracket;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECTIONS {
        let scale = lo.abs().max(hi.abs()).max(1.0);
        if hi - lo <= tol * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First sign change of `f` on a geometric grid `lo * ratio^k` up to `hi`.
pub fn scan_for_bracket(f: impl Fn(f64) -> f64, lo: f64, hi: f64, ratio: f64) -> Result<Bracket> {
    assert!(
        lo > 0.0 && ratio > 1.0,
        "geometric scan needs lo > 0, ratio > 1"
    );
    let mut a = lo;
    let mut fa = f(a);
    while a < hi {
        let b = (a * ratio).min(hi);
        let fb = f(b);
        if fa * fb <= 0.0 {
            return Ok(Bracket {
                lo: a,
                hi: b,
                f_lo: fa,
                f_hi: fb,
            });
        }
        a = b;
        fa = fb;
    }
    Err(QetError::Bracket {
        lo,
        hi,
        f_lo: f(lo),
        f_hi: fa,
    })
}
