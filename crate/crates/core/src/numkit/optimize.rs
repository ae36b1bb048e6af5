//! Golden-section search and a grid-then-refine minimizer for two variables.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Minimizes a unimodal `f` on `[a, b]` to bracket width `xtol`.
/// Returns `(x, f(x))`; endpoints are candidates as well.
pub fn golden_section_min(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if x2 <= x1 {
            break;
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a.min(b), a.max(b)] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Axis-aligned search box `[lo_i, hi_i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2 {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Box2 {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            lo: [x.0, y.0],
            hi: [x.1, y.1],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    /// Coarse grid points per axis.
    pub grid: usize,
    /// Stop once a full coordinate sweep moves both coordinates less than this.
    pub stationarity: f64,
    pub max_sweeps: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            grid: 181,
            stationarity: 1e-9,
            max_sweeps: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Min2d {
    pub argmin: [f64; 2],
    pub min: f64,
    pub sweeps: usize,
}

/// Coarse grid search followed by alternating golden-section refinement
/// along each axis, confined to one grid cell either side of the incumbent.
pub fn refine_min_2d(f: impl Fn(f64, f64) -> f64, domain: Box2, opts: RefineOptions) -> Min2d {
    let n = opts.grid.max(2);
    let step = [0, 1].map(|k| (domain.hi[k] - domain.lo[k]) / (n - 1) as f64);
    let coord = |k: usize, i: usize| {
        if i + 1 == n {
            domain.hi[k]
        } else {
            domain.lo[k] + step[k] * i as f64
        }
    };

    let mut best = ([domain.lo[0], domain.lo[1]], f64::INFINITY);
    for i in 0..n {
        let x = coord(0, i);
        for j in 0..n {
            let y = coord(1, j);
            let v = f(x, y);
            if v < best.1 {
                best = ([x, y], v);
            }
        }
    }

    let [mut x, mut y] = best.0;
    let mut fmin = best.1;
    let xtol = opts.stationarity * 1e-3;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let (nx, fx) = golden_section_min(
            |t| f(t, y),
            (x - step[0]).max(domain.lo[0]),
            (x + step[0]).min(domain.hi[0]),
            xtol,
        );
        let (ny, fy) = golden_section_min(
            |t| f(nx, t),
            (y - step[1]).max(domain.lo[1]),
            (y + step[1]).min(domain.hi[1]),
            xtol,
        );
        let (mut cx, mut cy, mut cf) = (x, y, fmin);
        if fx < cf {
            (cx, cf) = (nx, fx);
        }
        if fy < cf {
            (cx, cy, cf) = (nx, ny, fy);
        }
        let moved = (cx - x).abs().max((cy - y).abs());
        (x, y, fmin) = (cx, cy, cf);
        if moved < opts.stationarity {
            break;
        }
    }
    Min2d {
        argmin: [x, y],
        min: fmin,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn golden_parabola() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn golden_boundary_minimum() {
        let (x, _) = golden_section_min(|x| x, 1.0, 4.0, 1e-12);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn cosine_pair_corner() {
        let r = refine_min_2d(
            |a, b| a.cos() + b.cos(),
            Box2::new((0.0, PI), (0.0, PI)),
            RefineOptions::default(),
        );
        assert!((r.min + 2.0).abs() < 1e-12);
        assert!((r.argmin[0] - PI).abs() < 1e-6 && (r.argmin[1] - PI).abs() < 1e-6);
    }

    #[test]
    fn rotated_valley() {
        // correlated quadratic: coordinate sweeps must still converge
        let f = |x: f64, y: f64| {
            let (u, v) = (x + y - 1.0, x - y - 0.2);
            u * u + 25.0 * v * v
        };
        let r = refine_min_2d(
            f,
            Box2::new((-3.0, 3.0), (-3.0, 3.0)),
            RefineOptions::default(),
        );
        assert!(r.min < 1e-14);
        assert!((r.argmin[0] - 0.6).abs() < 1e-6);
        assert!((r.argmin[1] - 0.4).abs() < 1e-6);
    }
}
