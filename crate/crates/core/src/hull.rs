//! Lower convex envelopes of functions sampled on uniform grids.
//!
//! Coordinates are grid indices, so every geometric predicate works with
//! small integers. In one dimension the envelope is a monotone-chain lower
//! hull. In two dimensions each node is handled by a three-row linear
//! program: the envelope at `p` is the least value of `Σ λ_k f_k` over convex
//! weights `λ` whose barycentre is `p`, and the optimal dual is a supporting
//! plane.

use alloc::vec::Vec;

/// Relative tolerance for reduced costs and support tests.
const SUPPORT_TOL: f64 = 1e-12;
/// Consecutive non-improving pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 20;
const MAX_PIVOTS: usize = 20_000;

/// Lower convex envelope on the grid `0, 1, …, n−1`.
pub fn lower_hull_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    if n <= 2 {
        return f.to_vec();
    }
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n {
        while chain.len() >= 2 {
            let a = chain[chain.len() - 2];
            let b = chain[chain.len() - 1];
            // drop b unless it lies strictly below the chord a–k
            let lhs = (f[b] - f[a]) * (k - a) as f64;
            let rhs = (f[k] - f[a]) * (b - a) as f64;
            if lhs >= rhs {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(k);
    }
    let mut out = f.to_vec();
    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (f[b] - f[a]) / (b - a) as f64;
        for (k, slot) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            *slot = slot.min(f[a] + slope * (k - a) as f64);
        }
    }
    out
}

/// A supporting slope of a convex 1D grid function at node `k`, in index units.
///
/// Centred difference inside, one-sided at the ends; each lies between the
/// adjacent chord slopes, so the affine function through `(k, f[k])` with
/// this slope stays below every node.
pub fn supporting_slope_1d(f: &[f64], k: usize) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    if k == 0 {
        f[1] - f[0]
    } else if k == n - 1 {
        f[n - 1] - f[n - 2]
    } else {
        0.5 * (f[k + 1] - f[k - 1])
    }
}

/// Square `(m+1) × (m+1)` grid, row-major with the first index slowest.
#[derive(Debug, Clone, Copy)]
struct Square {
    side: usize,
}

impl Square {
    fn coords(self, k: usize) -> (i64, i64) {
        ((k / self.side) as i64, (k % self.side) as i64)
    }

    fn index(self, i: i64, j: i64) -> usize {
        i as usize * self.side + j as usize
    }

    fn len(self) -> usize {
        self.side * self.side
    }
}

/// Value of the lower envelope at a node together with a supporting plane,
/// slopes in index units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support2d {
    pub value: f64,
    pub slope: [f64; 2],
}

fn scale_of(f: &[f64]) -> f64 {
    1.0 + f.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)))
}

/// Tests whether the plane through `(p, f[p])` with slope `g` lies below all
/// nodes.
fn plane_supports(grid: Square, f: &[f64], p: usize, g: [f64; 2], tol: f64) -> bool {
    let (pi, pj) = grid.coords(p);
    let fp = f[p];
    f.iter().enumerate().all(|(k, &fk)| {
        let (i, j) = grid.coords(k);
        fk >= fp + g[0] * (i - pi) as f64 + g[1] * (j - pj) as f64 - tol
    })
}

fn candidate_slopes(grid: Square, f: &[f64], p: usize) -> ([f64; 3], usize, [f64; 3], usize) {
    let (i, j) = grid.coords(p);
    let last = grid.side as i64 - 1;
    let at = |a: i64, b: i64| f[grid.index(a, b)];
    let axis = |minus: Option<f64>, plus: Option<f64>| {
        let mut out = [0.0; 3];
        let mut n = 0;
        if let (Some(a), Some(b)) = (minus, plus) {
            out[n] = 0.5 * (a + b);
            n += 1;
        }
        for d in [minus, plus].into_iter().flatten() {
            out[n] = d;
            n += 1;
        }
        (out, n)
    };
    let fp = f[p];
    let (gi, ni) = axis(
        (i > 0).then(|| fp - at(i - 1, j)),
        (i < last).then(|| at(i + 1, j) - fp),
    );
    let (gj, nj) = axis(
        (j > 0).then(|| fp - at(i, j - 1)),
        (j < last).then(|| at(i, j + 1) - fp),
    );
    (gi, ni, gj, nj)
}

/// 3×3 inverse via the adjugate; `None` if singular.
fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let cof = [
        [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
        [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
        [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
    ];
    let det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
    if det == 0.0 {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for (r, row) in inv.iter_mut().enumerate() {
        for (c, slot) in row.iter_mut().enumerate() {
            *slot = cof[c][r] / det;
        }
    }
    Some(inv)
}

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Lower envelope at node `p` of a function on a square grid.
fn envelope_at(grid: Square, f: &[f64], p: usize, tol: f64) -> Support2d {
    let (gi, ni, gj, nj) = candidate_slopes(grid, f, p);
    for a in &gi[..ni] {
        for b in &gj[..nj] {
            if plane_supports(grid, f, p, [*a, *b], tol) {
                return Support2d { value: f[p], slope: [*a, *b] };
            }
        }
    }
    simplex_at(grid, f, p, tol)
}

fn simplex_at(grid: Square, f: &[f64], p: usize, tol: f64) -> Support2d {
    let (pi, pj) = grid.coords(p);
    let last = grid.side as i64 - 1;
    let column = |k: usize| {
        let (i, j) = grid.coords(k);
        [(i - pi) as f64, (j - pj) as f64, 1.0]
    };
    let ni = if pi < last { pi + 1 } else { pi - 1 };
    let nj = if pj < last { pj + 1 } else { pj - 1 };
    let mut basis = [p, grid.index(ni, pj), grid.index(pi, nj)];
    let mut best = f[p];
    let mut stalls = 0;
    let mut bland = false;
    let mut plane = [0.0; 3];
    for _ in 0..MAX_PIVOTS {
        let mut bmat = [[0.0; 3]; 3];
        for (c, &k) in basis.iter().enumerate() {
            let col = column(k);
            for r in 0..3 {
                bmat[r][c] = col[r];
            }
        }
        let Some(inv) = invert3(bmat) else { break };
        let x = mat_vec(&inv, [0.0, 0.0, 1.0]);
        let objective: f64 = (0..3).map(|r| f[basis[r]] * x[r].max(0.0)).sum();
        if objective < best - tol {
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                bland = true;
            }
        }
        best = best.min(objective);
        // plane coefficients y solve Bᵀ y = c_B
        let cb = [f[basis[0]], f[basis[1]], f[basis[2]]];
        plane = [
            inv[0][0] * cb[0] + inv[1][0] * cb[1] + inv[2][0] * cb[2],
            inv[0][1] * cb[0] + inv[1][1] * cb[1] + inv[2][1] * cb[2],
            inv[0][2] * cb[0] + inv[1][2] * cb[1] + inv[2][2] * cb[2],
        ];
        let mut entering = None;
        let mut most_negative = -tol;
        for k in 0..grid.len() {
            if basis.contains(&k) {
                continue;
            }
            let col = column(k);
            let reduced = f[k] - (plane[0] * col[0] + plane[1] * col[1] + plane[2]);
            if reduced < most_negative {
                entering = Some(k);
                if bland {
                    break;
                }
                most_negative = reduced;
            }
        }
        let Some(k) = entering else {
            return Support2d { value: plane[2].min(f[p]), slope: [plane[0], plane[1]] };
        };
        let d = mat_vec(&inv, column(k));
        let mut leave = None;
        let mut ratio = f64::INFINITY;
        for r in 0..3 {
            if d[r] > 1e-12 {
                let q = x[r].max(0.0) / d[r];
                let better = match leave {
                    None => true,
                    Some(l) => q < ratio - 1e-15 || (q <= ratio + 1e-15 && basis[r] < basis[l]),
                };
                if better {
                    ratio = q;
                    leave = Some(r);
                }
            }
        }
        match leave {
            Some(r) => basis[r] = k,
            None => break,
        }
    }
    Support2d { value: best.min(f[p]), slope: [plane[0], plane[1]] }
}

/// Lower convex envelope of a function on the `(m+1) × (m+1)` index grid.
pub fn lower_hull_2d(side: usize, f: &[f64]) -> Vec<f64> {
    let grid = Square { side };
    debug_assert_eq!(f.len(), grid.len());
    if side < 2 {
        return f.to_vec();
    }
    let tol = SUPPORT_TOL * scale_of(f);
    (0..grid.len()).map(|p| envelope_at(grid, f, p, tol).value).collect()
}

/// Supporting plane of the lower envelope at node `p` of a square grid.
pub fn support_2d(side: usize, f: &[f64], p: usize) -> Support2d {
    let grid = Square { side };
    let tol = SUPPORT_TOL * scale_of(f);
    envelope_at(grid, f, p, tol)
}

/// Lower convex envelope on a `side^dim` grid for `dim ∈ {1, 2}`.
pub fn lower_hull(dim: usize, side: usize, f: &[f64]) -> Vec<f64> {
    match dim {
        1 => lower_hull_1d(f),
        _ => lower_hull_2d(side, f),
    }
}

/// Largest amount by which the function exceeds its lower envelope.
pub fn convexity_gap(dim: usize, side: usize, f: &[f64]) -> f64 {
    lower_hull(dim, side, f).iter().zip(f).fold(0.0, |acc, (h, v)| acc.max(v - h))
}
