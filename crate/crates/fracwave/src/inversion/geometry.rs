use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hyperplane n.x + offset = 0 with n.x + offset <= 0 on U and >= 0 on D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatingNormal {
    pub n_hat: Vec<f64>,
    pub offset: f64,
    /// Distance between the convex hulls.
    pub gap: f64,
}

impl SeparatingNormal {
    /// Signed value n.x + offset.
    pub fn side(&self, x: &[f64]) -> f64 {
        dot(&self.n_hat, x) + self.offset
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.n_hat, x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Point of a set minimizing the projection on v.
fn support_min<'a>(pts: &'a [Vec<f64>], v: &[f64]) -> &'a [f64] {
    let mut best = &pts[0];
    let mut bv = f64::INFINITY;
    for p in pts {
        let s = dot(p, v);
        if s < bv {
            bv = s;
            best = p;
        }
    }
    best
}

/// Minimum-norm point of the affine hull of `pts` with its barycentric
/// weights, or None when the points are affinely dependent.
fn affine_min_norm(pts: &[Vec<f64>]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = pts.len();
    if n == 1 {
        return Some((pts[0].clone(), vec![1.0]));
    }
    // weights 1 - sum(mu), mu_i for the edges e_i = p_i - p_0; normal equations
    // (E^T E) mu = -E^T p_0
    let e: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    let m = n - 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = dot(&e[i], &e[j]);
        }
        a[i][m] = -dot(&e[i], &pts[0]);
    }
    let scale = a.iter().flat_map(|r| r[..m].iter()).fold(0.0f64, |s, v| s.max(v.abs()));
    for c in 0..m {
        let piv = (c..m).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[piv][c].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(c, piv);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                let pivot_row = a[c].clone();
                for (x, p) in a[r][c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mu: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    let mut w = vec![1.0 - mu.iter().sum::<f64>()];
    w.extend_from_slice(&mu);
    let mut x = vec![0.0; pts[0].len()];
    for (p, wi) in pts.iter().zip(&w) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += wi * pi;
        }
    }
    Some((x, w))
}

/// Minimum-norm point of the convex hull of at most d + 1 points, with the
/// subset that carries it.
fn simplex_min_norm(pts: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = pts.len();
    let mut best: Option<(f64, Vec<f64>, Vec<Vec<f64>>)> = None;
    for mask in 1u32..(1 << n) {
        let subset: Vec<Vec<f64>> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pts[i].clone()).collect();
        if let Some((x, w)) = affine_min_norm(&subset) {
            if w.iter().all(|v| *v >= -1e-12) {
                let nx = dot(&x, &x);
                if best.as_ref().is_none_or(|b| nx < b.0) {
                    best = Some((nx, x, subset));
                }
            }
        }
    }
    let (_, x, s) = best.expect("a single point is always feasible");
    (x, s)
}

/// Nearest point to the origin of conv(D) - conv(U) by the GJK iteration:
/// the support point of D - U in direction -v joins a simplex whose
/// minimum-norm point becomes the next v.
fn minimal_difference(d_pts: &[Vec<f64>], u_pts: &[Vec<f64>]) -> Vec<f64> {
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let mut simplex = vec![sub(&d_pts[0], &u_pts[0])];
    let mut v = simplex[0].clone();
    for _ in 0..1000 {
        let vv = dot(&v, &v);
        if vv == 0.0 {
            return v;
        }
        let w = sub(support_min(d_pts, &v), support_min(u_pts, &neg(&v)));
        if vv - dot(&v, &w) <= 1e-13 * vv || simplex.iter().any(|p| sub(p, &w).iter().all(|x| *x == 0.0)) {
            return v;
        }
        simplex.push(w);
        let (nv, kept) = simplex_min_norm(&simplex);
        if dot(&nv, &nv) >= vv {
            return v;
        }
        v = nv;
        simplex = kept;
    }
    v
}

/// Unit normal of a hyperplane separating the convex hulls of the support
/// points of D and U, pointing from U toward D, from the closest-point pair.
pub fn compute_separating_normal(d_pts: &[Vec<f64>], u_pts: &[Vec<f64>]) -> Result<SeparatingNormal> {
    if d_pts.is_empty() || u_pts.is_empty() {
        return Err(Error::Geometry("both supports must be non-empty".into()));
    }
    let dim = d_pts[0].len();
    if d_pts.iter().chain(u_pts).any(|p| p.len() != dim) {
        return Err(Error::Geometry("support points have inconsistent dimensions".into()));
    }
    let v = minimal_difference(d_pts, u_pts);
    let gap = dot(&v, &v).sqrt();
    let scale = d_pts.iter().chain(u_pts).flat_map(|p| p.iter()).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if gap <= 1e-9 * scale {
        return Err(Error::Geometry("the supports of the source and of the potential overlap".into()));
    }
    let n_hat: Vec<f64> = v.iter().map(|x| x / gap).collect();
    let s_d = d_pts.iter().map(|p| dot(&n_hat, p)).fold(f64::INFINITY, f64::min);
    let s_u = u_pts.iter().map(|p| dot(&n_hat, p)).fold(f64::NEG_INFINITY, f64::max);
    if s_d <= s_u {
        return Err(Error::Geometry("the supports of the source and of the potential overlap".into()));
    }
    Ok(SeparatingNormal { n_hat, offset: -0.5 * (s_d + s_u), gap })
}
