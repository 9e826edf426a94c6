//! Truncated Fock-basis reference simulator.
//!
//! States are ensembles of pure state vectors over a product Fock basis with a
//! common per-mode cutoff; mode 1 is the most significant index. Operators are
//! built from ladder-operator generators and exponentiated numerically, so this
//! crate shares no code or formulas with the phase-space engine it checks.
//!
//! Operator conventions (Heisenberg action `U† a U`):
//! - phase `φ`: `e^{iφ} a`
//! - squeezer `(r, θ)`: `cosh r · a + e^{iθ} sinh r · a†`
//! - displacement `α`: `a + α`
//! - beam splitter `T`: `a1 → √T a1 + √(1-T) a2`, `a2 → √(1-T) a1 - √T a2`
//! - two-mode squeezer `(r, θ)`: `a1 → cosh r · a1 + e^{iθ} sinh r · a2†` and symmetrically

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &DMatrix<C>) -> DMatrix<C> {
    let n = a.nrows();
    let norm: f64 = (0..n).map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scaled = a / C::new(2f64.powi(s), 0.0);
    let mut result = DMatrix::<C>::identity(n, n);
    let mut term = DMatrix::<C>::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / C::new(k as f64, 0.0);
        result += &term;
        if term.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Truncated annihilation operator of dimension `d`.
pub fn annihilation(d: usize) -> DMatrix<C> {
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Sparse two-mode operator, keyed by local indices `n1·d + n2`.
type Sparse = HashMap<(usize, usize), C>;

/// Matrix elements of `a1†^c1 a1^k1 a2†^c2 a2^k2` on the truncated product basis.
fn two_mode_monomial(d: usize, c1: usize, k1: usize, c2: usize, k2: usize, coeff: C, out: &mut Sparse) {
    let ladder = |n: usize, c: usize, k: usize| -> Option<(usize, f64)> {
        if n < k {
            return None;
        }
        let m = n - k;
        let to = m + c;
        if to >= d {
            return None;
        }
        let amp = 0.5 * (ln_factorial(n) - ln_factorial(m)) + 0.5 * (ln_factorial(to) - ln_factorial(m));
        Some((to, amp.exp()))
    };
    for n1 in 0..d {
        for n2 in 0..d {
            if let (Some((t1, a1)), Some((t2, a2))) = (ladder(n1, c1, k1), ladder(n2, c2, k2)) {
                *out.entry((t1 * d + t2, n1 * d + n2)).or_insert(ZERO) += coeff * a1 * a2;
            }
        }
    }
}

/// Unitary split into independent blocks of the generator's connectivity graph.
#[derive(Debug, Clone)]
pub struct BlockUnitary {
    blocks: Vec<(Vec<usize>, DMatrix<C>)>,
}

impl BlockUnitary {
    fn from_generator(dim: usize, gen: &Sparse) -> Self {
        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for (&(i, j), v) in gen {
            if v.norm() > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..dim {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut keys: Vec<usize> = groups.keys().copied().collect();
        keys.sort_unstable();
        let mut blocks = Vec::new();
        for k in keys {
            let idx = groups.remove(&k).unwrap();
            let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
            let mut g = DMatrix::zeros(idx.len(), idx.len());
            for (&(i, j), &v) in gen {
                if let (Some(&pi), Some(&pj)) = (pos.get(&i), pos.get(&j)) {
                    g[(pi, pj)] += v;
                }
            }
            blocks.push((idx, expm(&g)));
        }
        Self { blocks }
    }

    fn apply(&self, local: &[C]) -> Vec<C> {
        let mut out = vec![ZERO; local.len()];
        for (idx, u) in &self.blocks {
            for (pi, &i) in idx.iter().enumerate() {
                let mut acc = ZERO;
                for (pj, &j) in idx.iter().enumerate() {
                    acc += u[(pi, pj)] * local[j];
                }
                out[i] = acc;
            }
        }
        out
    }
}

/// Mixed state as a weighted ensemble of pure vectors.
#[derive(Debug, Clone)]
pub struct FockState {
    pub modes: usize,
    pub dim: usize,
    pub components: Vec<(f64, DVector<C>)>,
}

const PAD: usize = 60;

impl FockState {
    fn single(dim: usize, amps: Vec<C>) -> Self {
        Self { modes: 1, dim, components: vec![(1.0, DVector::from_vec(amps))] }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(cutoff, 0)
    }

    pub fn fock(cutoff: usize, n: usize) -> Self {
        let d = cutoff + 1;
        let mut v = vec![ZERO; d];
        v[n] = ONE;
        Self::single(d, v)
    }

    /// Coherent state by displacing the vacuum in a padded space.
    pub fn coherent(cutoff: usize, amplitude: f64, theta: f64) -> Self {
        let mut s = Self::vacuum(cutoff);
        s.displace(1, amplitude, theta);
        s
    }

    /// Thermal state with mean photon number `nbar`, as a mixture of Fock states.
    pub fn thermal(cutoff: usize, nbar: f64) -> Self {
        let d = cutoff + 1;
        let mut components = Vec::new();
        for n in 0..d {
            let w = nbar.powi(n as i32) / (nbar + 1.0).powi(n as i32 + 1);
            let mut v = vec![ZERO; d];
            v[n] = ONE;
            components.push((w, DVector::from_vec(v)));
        }
        Self { modes: 1, dim: d, components }
    }

    pub fn squeezed_vacuum(cutoff: usize, r: f64, theta: f64) -> Self {
        let mut s = Self::vacuum(cutoff);
        s.squeeze(1, r, theta);
        s
    }

    pub fn tensor(parts: &[FockState]) -> Self {
        let dim = parts[0].dim;
        let mut acc = parts[0].clone();
        for p in &parts[1..] {
            assert_eq!(p.dim, dim, "all modes share one cutoff");
            let mut comps = Vec::new();
            for (wa, va) in &acc.components {
                for (wb, vb) in &p.components {
                    let mut v = DVector::zeros(va.len() * vb.len());
                    for i in 0..va.len() {
                        for j in 0..vb.len() {
                            v[i * vb.len() + j] = va[i] * vb[j];
                        }
                    }
                    comps.push((wa * wb, v));
                }
            }
            acc = Self { modes: acc.modes + p.modes, dim, components: comps };
        }
        acc
    }

    fn stride(&self, mode: usize) -> usize {
        assert!(mode >= 1 && mode <= self.modes, "invalid mode {mode}");
        self.dim.pow((self.modes - mode) as u32)
    }

    fn total_len(&self) -> usize {
        self.dim.pow(self.modes as u32)
    }

    /// Applies a `dim × dim` operator to one mode of every component.
    pub fn apply_single(&mut self, mode: usize, u: &DMatrix<C>) {
        let s = self.stride(mode);
        let d = self.dim;
        let len = self.total_len();
        for (_, v) in &mut self.components {
            for base in 0..len {
                if (base / s) % d != 0 {
                    continue;
                }
                let local: Vec<C> = (0..d).map(|i| v[base + i * s]).collect();
                for i in 0..d {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += u[(i, j)] * local[j];
                    }
                    v[base + i * s] = acc;
                }
            }
        }
    }

    fn apply_pair(&mut self, m1: usize, m2: usize, u: &BlockUnitary) {
        let (s1, s2) = (self.stride(m1), self.stride(m2));
        let d = self.dim;
        let len = self.total_len();
        for (_, v) in &mut self.components {
            for base in 0..len {
                if (base / s1) % d != 0 || (base / s2) % d != 0 {
                    continue;
                }
                let mut local = vec![ZERO; d * d];
                for n1 in 0..d {
                    for n2 in 0..d {
                        local[n1 * d + n2] = v[base + n1 * s1 + n2 * s2];
                    }
                }
                let out = u.apply(&local);
                for n1 in 0..d {
                    for n2 in 0..d {
                        v[base + n1 * s1 + n2 * s2] = out[n1 * d + n2];
                    }
                }
            }
        }
    }

    /// Single-mode unitary `exp(G)` computed in a padded space and truncated.
    fn padded_single(&self, gen: impl Fn(&DMatrix<C>) -> DMatrix<C>) -> DMatrix<C> {
        let big = self.dim + PAD;
        let a = annihilation(big);
        let u = expm(&gen(&a));
        u.view((0, 0), (self.dim, self.dim)).into_owned()
    }

    pub fn rotate(&mut self, mode: usize, phi: f64) {
        let d = self.dim;
        let u = DMatrix::from_fn(d, d, |i, j| if i == j { C::from_polar(1.0, phi * i as f64) } else { ZERO });
        self.apply_single(mode, &u);
    }

    pub fn displace(&mut self, mode: usize, amplitude: f64, theta: f64) {
        let alpha = C::from_polar(amplitude, theta);
        let u = self.padded_single(|a| {
            let ad = a.adjoint();
            ad * alpha - a * alpha.conj()
        });
        self.apply_single(mode, &u);
    }

    pub fn squeeze(&mut self, mode: usize, r: f64, theta: f64) {
        let xi = C::from_polar(r, theta);
        let u = self.padded_single(|a| {
            let ad = a.adjoint();
            (&ad * &ad * xi - a * a * xi.conj()) * C::new(0.5, 0.0)
        });
        self.apply_single(mode, &u);
    }

    /// Beam splitter as `exp(iπ b†b)` with `b` the mode of the `-1` eigenvector of
    /// the (symmetric, orthogonal) mode matrix.
    pub fn beam_splitter(&mut self, m1: usize, m2: usize, t: f64) {
        let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
        // projector onto the -1 eigenspace: (I - M)/2
        let p = [[(1.0 - a) / 2.0, -b / 2.0], [-b / 2.0, (1.0 + a) / 2.0]];
        let d = self.dim;
        let mut gen = Sparse::new();
        let f = |x: f64| I * std::f64::consts::PI * x;
        two_mode_monomial(d, 1, 1, 0, 0, f(p[0][0]), &mut gen);
        two_mode_monomial(d, 0, 0, 1, 1, f(p[1][1]), &mut gen);
        two_mode_monomial(d, 1, 0, 0, 1, f(p[0][1]), &mut gen);
        two_mode_monomial(d, 0, 1, 1, 0, f(p[1][0]), &mut gen);
        let u = BlockUnitary::from_generator(d * d, &gen);
        self.apply_pair(m1, m2, &u);
    }

    pub fn two_mode_squeeze(&mut self, m1: usize, m2: usize, r: f64, theta: f64) {
        let xi = C::from_polar(r, theta);
        let d = self.dim;
        let mut gen = Sparse::new();
        two_mode_monomial(d, 1, 0, 1, 0, xi, &mut gen);
        two_mode_monomial(d, 0, 1, 0, 1, -xi.conj(), &mut gen);
        let u = BlockUnitary::from_generator(d * d, &gen);
        self.apply_pair(m1, m2, &u);
    }

    /// `+φ/2` on `m1`, `-φ/2` on `m2`.
    pub fn symmetric_phase(&mut self, m1: usize, m2: usize, phi: f64) {
        self.rotate(m1, phi / 2.0);
        self.rotate(m2, -phi / 2.0);
    }

    /// Beam splitter, symmetric phase, beam splitter on modes 1 and 2.
    pub fn mach_zehnder(&mut self, phi: f64) {
        self.beam_splitter(1, 2, 0.5);
        self.symmetric_phase(1, 2, phi);
        self.beam_splitter(1, 2, 0.5);
    }

    /// Unnormalized components after projecting `mode` onto the Fock states accepted by `keep`.
    fn project_where(&self, mode: usize, keep: impl Fn(usize) -> bool) -> (FockState, f64) {
        let s = self.stride(mode);
        let d = self.dim;
        let len = self.total_len();
        let new_len = len / d;
        let mut comps = Vec::new();
        let mut mass = 0.0;
        for (w, v) in &self.components {
            for n in 0..d {
                if !keep(n) {
                    continue;
                }
                let mut out = DVector::zeros(new_len);
                let mut k = 0;
                for idx in 0..len {
                    if (idx / s) % d == n {
                        out[k] = v[idx];
                        k += 1;
                    }
                }
                let nrm = out.norm_squared();
                if nrm > 0.0 {
                    mass += w * nrm;
                    comps.push((w * nrm, out / C::new(nrm.sqrt(), 0.0)));
                }
            }
        }
        (FockState { modes: self.modes - 1, dim: d, components: comps }, mass)
    }

    fn renormalized(mut self, mass: f64) -> Self {
        for c in &mut self.components {
            c.0 /= mass;
        }
        self
    }

    /// Projects `mode` onto `|n⟩`; returns the normalized remainder and the probability.
    pub fn project_fock(&self, mode: usize, n: usize) -> (FockState, f64) {
        let (s, p) = self.project_where(mode, |k| k == n);
        (s.renormalized(p), p)
    }

    pub fn project_not_fock(&self, mode: usize, n: usize) -> (FockState, f64) {
        let (s, p) = self.project_where(mode, |k| k != n);
        (s.renormalized(p), p)
    }

    pub fn project_click(&self, mode: usize) -> (FockState, f64) {
        self.project_not_fock(mode, 0)
    }

    /// Partial trace over `mode`.
    pub fn trace_out(&self, mode: usize) -> FockState {
        self.project_where(mode, |_| true).0
    }

    /// Loss on one mode: mixing with a vacuum ancilla on `BS(η)` and tracing it out.
    pub fn lose(&self, mode: usize, eta: f64) -> FockState {
        self.inject_thermal(mode, 0.0, eta)
    }

    pub fn inject_thermal(&self, mode: usize, nbar: f64, eta: f64) -> FockState {
        let cutoff = self.dim - 1;
        let anc = if nbar == 0.0 { Self::vacuum(cutoff) } else { Self::thermal(cutoff, nbar) };
        let mut joint = Self::tensor(&[self.clone(), anc]);
        joint.beam_splitter(mode, self.modes + 1, eta);
        joint.trace_out(self.modes + 1)
    }

    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(w, v)| w * v.norm_squared()).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for (wa, va) in &self.components {
            for (wb, vb) in &self.components {
                acc += wa * wb * va.dotc(vb).norm_sqr();
            }
        }
        acc
    }

    /// Joint photon-number distribution of the listed modes, flattened with the
    /// first listed mode most significant.
    pub fn joint_distribution(&self, modes: &[usize]) -> Vec<f64> {
        let d = self.dim;
        let strides: Vec<usize> = modes.iter().map(|&m| self.stride(m)).collect();
        let mut out = vec![0.0; d.pow(modes.len() as u32)];
        for (w, v) in &self.components {
            for (idx, amp) in v.iter().enumerate() {
                let p = amp.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let mut key = 0;
                for &s in &strides {
                    key = key * d + (idx / s) % d;
                }
                out[key] += w * p;
            }
        }
        out
    }

    pub fn photon_distribution(&self, mode: usize) -> Vec<f64> {
        self.joint_distribution(&[mode])
    }

    pub fn mean_photon(&self, mode: usize) -> f64 {
        self.photon_distribution(mode).iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn photon_second_moment(&self, mode: usize) -> f64 {
        self.photon_distribution(mode).iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum()
    }

    pub fn parity(&self, mode: usize) -> f64 {
        self.photon_distribution(mode).iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -p }).sum()
    }

    pub fn click_probability(&self, mode: usize) -> f64 {
        1.0 - self.photon_distribution(mode)[0]
    }

    /// Mean and second moment of `n_a - n_b`.
    pub fn difference_moments(&self, a: usize, b: usize) -> (f64, f64) {
        let d = self.dim;
        let joint = self.joint_distribution(&[a, b]);
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for na in 0..d {
            for nb in 0..d {
                let diff = na as f64 - nb as f64;
                m1 += diff * joint[na * d + nb];
                m2 += diff * diff * joint[na * d + nb];
            }
        }
        (m1, m2)
    }

    /// Mean and second moment of `x cos θ + p sin θ` on one mode.
    pub fn quadrature_moments(&self, mode: usize, theta: f64) -> (f64, f64) {
        let d = self.dim;
        let a = annihilation(d);
        let e = C::from_polar(1.0, -theta);
        // R(θ) = (e^{-iθ} a + e^{iθ} a†)/√2
        let r = (&a * e + a.adjoint() * e.conj()) / C::new(2f64.sqrt(), 0.0);
        let r2 = &r * &r;
        let mut copy = self.clone();
        copy.apply_single(mode, &r);
        let mut copy2 = self.clone();
        copy2.apply_single(mode, &r2);
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (((w, v), (_, rv)), (_, r2v)) in self.components.iter().zip(&copy.components).zip(&copy2.components) {
            m1 += w * v.dotc(rv).re;
            m2 += w * v.dotc(r2v).re;
        }
        (m1, m2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_state_is_poissonian() {
        let s = FockState::coherent(40, 1.5, 0.3);
        let p = s.photon_distribution(1);
        let mut expect = (-2.25f64).exp();
        for (n, &v) in p.iter().enumerate().take(15) {
            if n > 0 {
                expect *= 2.25 / n as f64;
            }
            assert!((v - expect).abs() < 1e-12, "n={n}: {v} vs {expect}");
        }
    }

    #[test]
    fn beam_splitter_heisenberg_action() {
        // a1 coherent α through BS(T): output 1 amplitude √T α, output 2 √(1-T) α.
        let t = 0.3;
        let mut s = FockState::tensor(&[FockState::coherent(30, 1.0, 0.0), FockState::vacuum(30)]);
        s.beam_splitter(1, 2, t);
        assert!((s.mean_photon(1) - t).abs() < 1e-10);
        assert!((s.mean_photon(2) - (1.0 - t)).abs() < 1e-10);
        let (x2, _) = s.quadrature_moments(2, 0.0);
        assert!((x2 - 2f64.sqrt() * (1.0 - t).sqrt()).abs() < 1e-10);
        // vacuum in port 1, coherent in port 2: output 2 picks up -√T
        let mut s = FockState::tensor(&[FockState::vacuum(30), FockState::coherent(30, 1.0, 0.0)]);
        s.beam_splitter(1, 2, t);
        let (x2, _) = s.quadrature_moments(2, 0.0);
        assert!((x2 + 2f64.sqrt() * t.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn squeezer_antisqueezes_x_at_zero_angle() {
        let r = 0.4;
        let s = FockState::squeezed_vacuum(40, r, 0.0);
        let (_, x2) = s.quadrature_moments(1, 0.0);
        let (_, p2) = s.quadrature_moments(1, std::f64::consts::FRAC_PI_2);
        assert!((x2 - (2.0 * r).exp() / 2.0).abs() < 1e-9);
        assert!((p2 - (-2.0 * r).exp() / 2.0).abs() < 1e-9);
    }
}
