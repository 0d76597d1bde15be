//! Symmetric square of the standard tractor module for the free distribution
//! geometry of so(n+1, n): nilpotent action, exponential and normal solutions.

use num::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{EngineError, Result};
use crate::linalg;
use crate::rational::{fmt_q, q, qf, Q};

type Mat = Vec<Vec<Q>>;

fn zeros(n: usize) -> Mat {
    vec![vec![Q::zero(); n]; n]
}

/// Element (nu, sigma, kappa | psi, xi, tau) of S^2 V. `psi[b][c]` is psi_b^c.
#[derive(Clone, Debug, PartialEq)]
pub struct TractorS2V {
    pub n: usize,
    pub nu: Mat,
    pub sigma: Vec<Q>,
    pub kappa: Q,
    pub psi: Mat,
    pub xi: Vec<Q>,
    pub tau: Mat,
}

/// Parameter (x, y) of the nilpotent radical; y is antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentParam {
    pub x: Vec<Q>,
    pub y: Mat,
}

/// Standard tractor (lambda^a, tau, l_a).
#[derive(Clone, Debug, PartialEq)]
pub struct Tractor {
    pub lambda: Vec<Q>,
    pub tau: Q,
    pub l: Vec<Q>,
}

impl TractorS2V {
    pub fn zero(n: usize) -> Self {
        TractorS2V {
            n,
            nu: zeros(n),
            sigma: vec![Q::zero(); n],
            kappa: Q::zero(),
            psi: zeros(n),
            xi: vec![Q::zero(); n],
            tau: zeros(n),
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == TractorS2V::zero(self.n)
    }

    pub fn trace_psi(&self) -> Q {
        (0..self.n).map(|c| self.psi[c][c].clone()).sum()
    }

    pub fn is_tracefree(&self) -> bool {
        self.kappa == -self.trace_psi()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.n;
        let sq = |m: &Mat| m.len() == n && m.iter().all(|r| r.len() == n);
        if !sq(&self.nu) || !sq(&self.psi) || !sq(&self.tau) || self.sigma.len() != n || self.xi.len() != n {
            return Err(EngineError::DimensionMismatch { expected: n, got: self.sigma.len() });
        }
        for a in 0..n {
            for b in 0..n {
                if self.nu[a][b] != self.nu[b][a] || self.tau[a][b] != self.tau[b][a] {
                    return Err(EngineError::Rejected("nu and tau must be symmetric".into()));
                }
            }
        }
        Ok(())
    }

    /// self += a * o
    pub fn axpy(&mut self, a: &Q, o: &TractorS2V) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                self.nu[i][j] += a * &o.nu[i][j];
                self.psi[i][j] += a * &o.psi[i][j];
                self.tau[i][j] += a * &o.tau[i][j];
            }
            self.sigma[i] += a * &o.sigma[i];
            self.xi[i] += a * &o.xi[i];
        }
        self.kappa += a * &o.kappa;
    }

    /// v . w with the convention nu = lambda (x) lambda~ + lambda~ (x) lambda, etc.
    pub fn sym_product(v: &Tractor, w: &Tractor) -> Self {
        let n = v.lambda.len();
        let mut out = TractorS2V::zero(n);
        for a in 0..n {
            for b in 0..n {
                out.nu[a][b] = &v.lambda[a] * &w.lambda[b] + &w.lambda[a] * &v.lambda[b];
                out.psi[b][a] = &v.l[b] * &w.lambda[a] + &v.lambda[a] * &w.l[b];
                out.tau[a][b] = &v.l[a] * &w.l[b] + &w.l[a] * &v.l[b];
            }
            out.sigma[a] = &v.lambda[a] * &w.tau + &v.tau * &w.lambda[a];
            out.xi[a] = &v.l[a] * &w.tau + &v.tau * &w.l[a];
        }
        out.kappa = &v.tau * &w.tau;
        out
    }
}

impl NilpotentParam {
    pub fn check(&self) -> Result<()> {
        let n = self.x.len();
        if self.y.len() != n || self.y.iter().any(|r| r.len() != n) {
            return Err(EngineError::DimensionMismatch { expected: n, got: self.y.len() });
        }
        for a in 0..n {
            for b in 0..n {
                if self.y[a][b] != -self.y[b][a].clone() {
                    return Err(EngineError::Rejected("y must be antisymmetric".into()));
                }
            }
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        NilpotentParam {
            x: self.x.iter().map(|v| -v).collect(),
            y: self.y.iter().map(|r| r.iter().map(|v| -v).collect()).collect(),
        }
    }

    pub fn scale(&self, t: &Q) -> Self {
        NilpotentParam {
            x: self.x.iter().map(|v| v * t).collect(),
            y: self.y.iter().map(|r| r.iter().map(|v| v * t).collect()).collect(),
        }
    }
}

/// Action on the standard tractor.
pub fn tractor_action(p: &NilpotentParam, v: &Tractor) -> Tractor {
    let n = p.x.len();
    Tractor {
        lambda: (0..n).map(|a| &p.x[a] * &v.tau + (0..n).map(|b| &p.y[a][b] * &v.l[b]).sum::<Q>()).collect(),
        tau: -(0..n).map(|b| &p.x[b] * &v.l[b]).sum::<Q>(),
        l: vec![Q::zero(); n],
    }
}

/// The displayed action on S^2 V, taken literally.
pub fn nilpotent_action(p: &NilpotentParam, f: &TractorS2V) -> Result<TractorS2V> {
    f.check()?;
    p.check()?;
    let n = f.n;
    if p.x.len() != n {
        return Err(EngineError::DimensionMismatch { expected: n, got: p.x.len() });
    }
    let (x, y) = (&p.x, &p.y);
    let mut out = TractorS2V::zero(n);
    for a in 0..n {
        for b in 0..n {
            let mut v = &x[a] * &f.sigma[b] + &f.sigma[a] * &x[b];
            for c in 0..n {
                v -= &y[c][a] * &f.psi[c][b] + &y[c][b] * &f.psi[c][a];
            }
            out.nu[a][b] = v;
            out.psi[b][a] = &x[a] * &f.xi[b];
        }
        let mut s = -(&x[a] * &f.kappa);
        for c in 0..n {
            s += &x[c] * &f.psi[c][a] + &y[a][c] * &f.xi[c];
        }
        out.sigma[a] = s;
        out.xi[a] = -(0..n).map(|b| &x[b] * &f.tau[b][a]).sum::<Q>();
    }
    out.kappa = -(0..n).map(|b| &x[b] * &f.xi[b]).sum::<Q>();
    Ok(out)
}

/// Successive iterates Phi, x.Phi, ..., x^k.Phi.
pub fn iterates(p: &NilpotentParam, f: &TractorS2V, k: usize) -> Result<Vec<TractorS2V>> {
    let mut out = vec![f.clone()];
    for _ in 0..k {
        let next = nilpotent_action(p, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// exp(x) . Phi, truncated after the fourth iterate.
pub fn exp_action(p: &NilpotentParam, f: &TractorS2V) -> Result<TractorS2V> {
    let it = iterates(p, f, 5)?;
    if !it[5].is_zero() {
        return Err(EngineError::Consistency("fifth iterate of the nilpotent action is nonzero".into()));
    }
    let mut out = TractorS2V::zero(f.n);
    let mut fact = Q::one();
    for (k, t) in it.iter().take(5).enumerate() {
        if k > 0 {
            fact *= q(k as i64);
        }
        out.axpy(&(Q::one() / &fact), t);
    }
    Ok(out)
}

/// Projection of exp(x) . Phi onto S^2 H.
pub fn normal_solution(p: &NilpotentParam, f: &TractorS2V) -> Result<Mat> {
    Ok(exp_action(p, f)?.nu)
}

pub const MONOMIALS: [&str; 9] = [
    "nu^{ab}",
    "x^{(a}sigma^{b)}",
    "y^{c(a}psi^{b)}_c",
    "x^c x^{(a}psi_c^{b)}",
    "x^{(a}y^{b)c}xi_c",
    "x^a x^b psi^c_c",
    "x^a x^b x^c xi_c",
    "x^{(a}y^{b)c}x^d tau_{dc}",
    "x^a x^b x^c x^d tau_{cd}",
];

/// Coefficients of the nine monomials in the displayed closed form.
pub fn closed_form_coefficients() -> [Q; 9] {
    [q(1), q(1), q(-1), qf(1, 2), q(1), qf(1, 2), qf(2, 3), qf(-1, 3), qf(-1, 6)]
}

/// Values of the nine monomials at (x, y, Phi).
pub fn monomials(p: &NilpotentParam, f: &TractorS2V) -> Vec<Mat> {
    let n = f.n;
    let (x, y) = (&p.x, &p.y);
    let sym = |u: &[Q], v: &[Q]| -> Mat {
        (0..n).map(|a| (0..n).map(|b| &u[a] * &v[b] + &v[a] * &u[b]).collect()).collect()
    };
    let xx: Mat = (0..n).map(|a| (0..n).map(|b| &x[a] * &x[b]).collect()).collect();
    let scale = |m: &Mat, s: &Q| -> Mat { m.iter().map(|r| r.iter().map(|v| v * s).collect()).collect() };
    let x_dot = |v: &[Q]| -> Q { (0..n).map(|c| &x[c] * &v[c]).sum() };
    let ypsi: Mat = (0..n)
        .map(|a| (0..n).map(|b| (0..n).map(|c| &y[c][a] * &f.psi[c][b] + &y[c][b] * &f.psi[c][a]).sum()).collect())
        .collect();
    // x^c psi_c^b
    let xpsi: Vec<Q> = (0..n).map(|b| (0..n).map(|c| &x[c] * &f.psi[c][b]).sum()).collect();
    let yxi: Vec<Q> = (0..n).map(|b| (0..n).map(|c| &y[b][c] * &f.xi[c]).sum()).collect();
    let xtau: Vec<Q> = (0..n).map(|c| (0..n).map(|d| &x[d] * &f.tau[d][c]).sum()).collect();
    let yxtau: Vec<Q> = (0..n).map(|b| (0..n).map(|c| &y[b][c] * &xtau[c]).sum()).collect();
    vec![
        f.nu.clone(),
        sym(x, &f.sigma),
        ypsi,
        sym(x, &xpsi),
        sym(x, &yxi),
        scale(&xx, &f.trace_psi()),
        scale(&xx, &x_dot(&f.xi)),
        sym(x, &yxtau),
        scale(&xx, &x_dot(&xtau)),
    ]
}

pub fn closed_form_with(p: &NilpotentParam, f: &TractorS2V, coeffs: &[Q]) -> Mat {
    let n = f.n;
    let mut out = zeros(n);
    for (m, c) in monomials(p, f).iter().zip(coeffs) {
        for a in 0..n {
            for b in 0..n {
                out[a][b] += c * &m[a][b];
            }
        }
    }
    out
}

/// The displayed normal-solution polynomial.
pub fn closed_form(p: &NilpotentParam, f: &TractorS2V) -> Mat {
    closed_form_with(p, f, &closed_form_coefficients())
}

fn rand_q<R: Rng>(rng: &mut R, bound: i64) -> Q {
    qf(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
}

pub fn random_param<R: Rng>(rng: &mut R, n: usize, bound: i64) -> NilpotentParam {
    let x = (0..n).map(|_| rand_q(rng, bound)).collect();
    let mut y = zeros(n);
    for a in 0..n {
        for b in a + 1..n {
            let v = rand_q(rng, bound);
            y[b][a] = -v.clone();
            y[a][b] = v;
        }
    }
    NilpotentParam { x, y }
}

/// Random element; with `tracefree`, kappa = -psi^c_c.
pub fn random_s2v<R: Rng>(rng: &mut R, n: usize, bound: i64, tracefree: bool) -> TractorS2V {
    let mut f = TractorS2V::zero(n);
    for a in 0..n {
        for b in a..n {
            let v = rand_q(rng, bound);
            f.nu[a][b] = v.clone();
            f.nu[b][a] = v;
            let t = rand_q(rng, bound);
            f.tau[a][b] = t.clone();
            f.tau[b][a] = t;
        }
        for b in 0..n {
            f.psi[a][b] = rand_q(rng, bound);
        }
        f.sigma[a] = rand_q(rng, bound);
        f.xi[a] = rand_q(rng, bound);
    }
    f.kappa = if tracefree { -f.trace_psi() } else { rand_q(rng, bound) };
    f
}

pub fn random_tractor<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Tractor {
    Tractor {
        lambda: (0..n).map(|_| rand_q(rng, bound)).collect(),
        tau: rand_q(rng, bound),
        l: (0..n).map(|_| rand_q(rng, bound)).collect(),
    }
}

/// Residual of the action on v . w against (x.v) . w + v . (x.w).
pub fn leibniz_residual(p: &NilpotentParam, v: &Tractor, w: &Tractor) -> Result<TractorS2V> {
    let lhs = nilpotent_action(p, &TractorS2V::sym_product(v, w))?;
    let mut rhs = TractorS2V::sym_product(&tractor_action(p, v), w);
    rhs.axpy(&Q::one(), &TractorS2V::sym_product(v, &tractor_action(p, w)));
    let mut res = lhs;
    res.axpy(&-Q::one(), &rhs);
    Ok(res)
}

/// Fits the nine monomial coefficients to the exponential pathway on tracefree
/// samples. None if the normal solution is not in their span.
pub fn fit_coefficients<R: Rng>(rng: &mut R, n: usize, samples: usize) -> Result<Option<Vec<Q>>> {
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    for _ in 0..samples {
        let p = random_param(rng, n, 5);
        let f = random_s2v(rng, n, 5, true);
        let eta = normal_solution(&p, &f)?;
        let ms = monomials(&p, &f);
        for a in 0..n {
            for b in a..n {
                rows.push(ms.iter().map(|m| m[a][b].clone()).collect());
                rhs.push(eta[a][b].clone());
            }
        }
    }
    // normal equations keep the system square
    let k = MONOMIALS.len();
    let ata: Vec<Vec<Q>> = (0..k)
        .map(|i| (0..k).map(|j| rows.iter().map(|r| &r[i] * &r[j]).sum()).collect())
        .collect();
    let atb: Vec<Q> = (0..k).map(|i| rows.iter().zip(&rhs).map(|(r, y)| &r[i] * y).sum()).collect();
    let Some(c) = linalg::solve(&ata, &atb) else { return Ok(None) };
    let exact = rows.iter().zip(&rhs).all(|(r, y)| r.iter().zip(&c).map(|(a, b)| a * b).sum::<Q>() == *y);
    Ok(if exact { Some(c) } else { None })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicReport {
    pub monomial: String,
    pub displayed: String,
    pub fitted: Option<String>,
}

/// Side by side: displayed coefficients and those fitted from the exponential.
pub fn symbolic_report<R: Rng>(rng: &mut R, n: usize) -> Result<Vec<SymbolicReport>> {
    let fitted = fit_coefficients(rng, n, 6)?;
    Ok(MONOMIALS
        .iter()
        .zip(closed_form_coefficients())
        .enumerate()
        .map(|(i, (m, c))| SymbolicReport {
            monomial: m.to_string(),
            displayed: fmt_q(&c),
            fitted: fitted.as_ref().map(|f| fmt_q(&f[i])),
        })
        .collect())
}

pub fn render_symbolic(rows: &[SymbolicReport]) -> String {
    let mut s = String::from("eta^{ab}(x,y) =\n");
    for r in rows {
        let fit = r.fitted.as_deref().unwrap_or("-");
        s.push_str(&format!("  {:>5} * {:<28} (exp pathway: {fit})\n", r.displayed, r.monomial));
    }
    s
}
