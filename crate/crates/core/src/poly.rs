//! Sparse multivariate polynomials with real coefficients, plus Gaussian
//! moments of monomials via Isserlis' theorem.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

pub type Exponents = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    /// `c + Σ coeffs[i] x_i`.
    pub fn linear(coeffs: &[f64], c: f64) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, c);
        for (i, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                let mut e = vec![0; n];
                e[i] = 1;
                p.add_term(e, a);
            }
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, f64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent tuple has the wrong length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exponents, &f64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u16]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Exponents, c: f64) {
        if c == 0.0 {
            return;
        }
        *self.terms.entry(e).or_insert(0.0) += c;
    }

    pub fn add_scaled(&mut self, other: &Poly, s: f64) {
        assert_eq!(self.nvars, other.nvars);
        for (e, &c) in &other.terms {
            self.add_term(e.clone(), c * s);
        }
    }

    pub fn scaled(&self, s: f64) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, &c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Moves variable `i` to position `map[i]` of a polynomial in `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(nvars);
        for (e, &c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] += k;
            }
            out.add_term(ne, c);
        }
        out
    }

    /// Composes with the affine map `x_i = Σ_j a[i,j] y_j + b[i]` over `a.ncols()` new variables.
    pub fn substitute_affine(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> Poly {
        assert_eq!(a.nrows(), self.nvars);
        let m = a.ncols();
        let forms: Vec<Poly> = (0..self.nvars)
            .map(|i| Poly::linear(&a.row(i).iter().copied().collect::<Vec<_>>(), b[i]))
            .collect();
        let mut powers: Vec<Vec<Poly>> = forms.iter().map(|f| vec![Poly::constant(m, 1.0), f.clone()]).collect();
        let mut out = Poly::zero(m);
        for (e, &c) in &self.terms {
            let mut acc = Poly::constant(m, c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&forms[i]);
                    powers[i].push(next);
                }
                acc = acc.mul(&powers[i][k as usize]);
            }
            out.add_scaled(&acc, 1.0);
        }
        out
    }

    /// `E[P(m + Y)]` for `Y ~ N(0, cov)`.
    pub fn gaussian_expectation(&self, mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
        let n = self.nvars;
        let shifted = self.substitute_affine(&DMatrix::identity(n, n), mean);
        let mut moments = CentralMoments::new(cov.clone());
        shifted.terms.iter().map(|(e, &c)| c * moments.get(e)).sum()
    }

    /// Integrates the variables in `over` against a centred Gaussian with covariance `cov`
    /// (indexed in the order of `over`); the remaining variables keep their relative order.
    pub fn partial_expectation(&self, over: &[usize], cov: &DMatrix<f64>) -> Poly {
        let keep: Vec<usize> = (0..self.nvars).filter(|i| !over.contains(i)).collect();
        let mut moments = CentralMoments::new(cov.clone());
        let mut out = Poly::zero(keep.len());
        for (e, &c) in &self.terms {
            let inner: Exponents = over.iter().map(|&i| e[i]).collect();
            let m = moments.get(&inner);
            if m != 0.0 {
                out.add_term(keep.iter().map(|&i| e[i]).collect(), c * m);
            }
        }
        out
    }
}

/// Memoized central moments `E[Y^e]` of a zero-mean Gaussian vector.
pub struct CentralMoments {
    cov: DMatrix<f64>,
    memo: HashMap<Exponents, f64>,
}

impl CentralMoments {
    pub fn new(cov: DMatrix<f64>) -> Self {
        Self { cov, memo: HashMap::new() }
    }

    pub fn get(&mut self, e: &[u16]) -> f64 {
        let total: u32 = e.iter().map(|&k| k as u32).sum();
        if total == 0 {
            return 1.0;
        }
        if total % 2 == 1 {
            return 0.0;
        }
        if let Some(&v) = self.memo.get(e) {
            return v;
        }
        // E[y_i y^r] = Σ_j cov[i,j] r_j E[y^(r - δ_j)] with r = e - δ_i.
        let i = e.iter().position(|&k| k > 0).unwrap();
        let mut r = e.to_vec();
        r[i] -= 1;
        let mut acc = 0.0;
        for j in 0..r.len() {
            if r[j] == 0 || self.cov[(i, j)] == 0.0 {
                continue;
            }
            let mut rr = r.clone();
            rr[j] -= 1;
            acc += self.cov[(i, j)] * r[j] as f64 * self.get(&rr);
        }
        self.memo.insert(e.to_vec(), acc);
        acc
    }
}

/// Coefficients of the Laguerre polynomial `L_n(t)` in powers of `t`.
pub fn laguerre_coefficients(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    for k in 0..=n {
        if k > 0 {
            c *= -((n - k + 1) as f64) / ((k * k) as f64);
        }
        out.push(c);
    }
    out
}

/// `L_n(t)` by the three-term recurrence.
pub fn laguerre(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 - t);
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - t) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n(scale·(x² + p²))` as a polynomial in the two variables at positions `ix`, `ip`.
pub fn radial_laguerre(n: usize, scale: f64, nvars: usize, ix: usize, ip: usize) -> Poly {
    let mut r2 = Poly::zero(nvars);
    let mut ex = vec![0; nvars];
    ex[ix] = 2;
    r2.add_term(ex, scale);
    let mut ep = vec![0; nvars];
    ep[ip] = 2;
    r2.add_term(ep, scale);
    let mut out = Poly::zero(nvars);
    let mut power = Poly::constant(nvars, 1.0);
    for (k, c) in laguerre_coefficients(n).into_iter().enumerate() {
        if k > 0 {
            power = power.mul(&r2);
        }
        out.add_scaled(&power, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_forms_agree() {
        for n in 0..10 {
            let c = laguerre_coefficients(n);
            for &t in &[0.0f64, 0.3, 1.7, 4.0] {
                let direct: f64 = c.iter().enumerate().map(|(k, a)| a * t.powi(k as i32)).sum();
                assert!((direct - laguerre(n, t)).abs() < 1e-10 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn isserlis_fourth_moment() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let mut m = CentralMoments::new(cov);
        assert!((m.get(&[4, 0]) - 12.0).abs() < 1e-12);
        // E[x²y²] = σxx σyy + 2σxy²
        assert!((m.get(&[2, 2]) - 2.5).abs() < 1e-12);
        assert_eq!(m.get(&[1, 2]), 0.0);
    }

    #[test]
    fn substitution_round_trip() {
        let p = Poly::from_terms(2, [(vec![2, 1], 3.0), (vec![0, 0], -1.0)]);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![0.5, -1.0]);
        let q = p.substitute_affine(&a, &b);
        let y = [0.3, -0.7];
        let x = [y[0] + 2.0 * y[1] + 0.5, y[1] - 1.0];
        assert!((q.eval(&y) - p.eval(&x)).abs() < 1e-12);
    }
}
