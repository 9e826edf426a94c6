//! Symplectic transforms for the optical elements of an interferometer.
//!
//! Phase-space vectors are ordered `(x1, p1, x2, p2, ...)` and mode `k`
//! (1-based) occupies rows `2k-2` and `2k-1` of every matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, CoreError, CoreResult};

pub type QuadratureVector = DVector<f64>;

pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Block-diagonal symplectic form with `[[0, 1], [-1, 0]]` blocks.
pub fn omega(modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Rows of mode `mode` (1-based) after validation against `modes`.
pub fn mode_rows(mode: usize, modes: usize) -> CoreResult<(usize, usize)> {
    if mode == 0 || mode > modes {
        return Err(CoreError::InvalidMode { mode, modes });
    }
    Ok((2 * mode - 2, 2 * mode - 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    pub matrix: DMatrix<f64>,
    pub shift: Option<QuadratureVector>,
}

impl SymplecticTransform {
    /// Wraps a matrix after checking shape and the symplectic condition.
    pub fn new(matrix: DMatrix<f64>, shift: Option<QuadratureVector>) -> CoreResult<Self> {
        let n = matrix.nrows();
        if n == 0 || n % 2 != 0 || matrix.ncols() != n {
            return domain(format!(
                "transform must be square with even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        if let Some(s) = &shift {
            if s.len() != n {
                return Err(CoreError::DimensionMismatch { expected: n, got: s.len() });
            }
        }
        let t = Self { matrix, shift };
        if t.symplectic_defect() > SYMPLECTIC_TOL {
            return domain(format!("matrix is not symplectic (defect {:e})", t.symplectic_defect()));
        }
        Ok(t)
    }

    fn raw(matrix: DMatrix<f64>) -> Self {
        Self { matrix, shift: None }
    }

    pub fn identity(modes: usize) -> Self {
        Self::raw(DMatrix::identity(2 * modes, 2 * modes))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn modes(&self) -> usize {
        self.dim() / 2
    }

    /// Max-norm of `f Ω fᵀ - Ω`.
    pub fn symplectic_defect(&self) -> f64 {
        let om = omega(self.modes());
        (&self.matrix * &om * self.matrix.transpose() - om).amax()
    }

    pub fn shift_or_zero(&self) -> QuadratureVector {
        self.shift.clone().unwrap_or_else(|| DVector::zeros(self.dim()))
    }

    /// Inverse of the linear part, `-Ω fᵀ Ω`.
    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        let om = omega(self.modes());
        -(&om * self.matrix.transpose() * &om)
    }

    /// Maps a phase-space point: `f x + shift`.
    pub fn apply(&self, x: &QuadratureVector) -> QuadratureVector {
        let mut y = &self.matrix * x;
        if let Some(s) = &self.shift {
            y += s;
        }
        y
    }

    /// Places this transform on the listed modes (1-based) of a larger system.
    pub fn embed(&self, modes: &[usize], total: usize) -> CoreResult<Self> {
        if modes.len() != self.modes() {
            return Err(CoreError::DimensionMismatch { expected: self.modes(), got: modes.len() });
        }
        let mut rows = Vec::with_capacity(2 * modes.len());
        for (i, &m) in modes.iter().enumerate() {
            let (a, b) = mode_rows(m, total)?;
            if modes[..i].contains(&m) {
                return domain(format!("mode {m} listed twice"));
            }
            rows.push(a);
            rows.push(b);
        }
        let mut matrix = DMatrix::identity(2 * total, 2 * total);
        for (i, &ri) in rows.iter().enumerate() {
            for (j, &rj) in rows.iter().enumerate() {
                matrix[(ri, rj)] = self.matrix[(i, j)];
            }
        }
        let shift = self.shift.as_ref().map(|s| {
            let mut full = DVector::zeros(2 * total);
            for (i, &ri) in rows.iter().enumerate() {
                full[ri] = s[i];
            }
            full
        });
        Ok(Self { matrix, shift })
    }
}

fn check_finite(name: &str, v: f64) -> CoreResult<()> {
    if v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be finite, got {v}"))
    }
}

/// Beam splitter with transmissivity `t`; the second output carries the `-√T` sign.
pub fn beam_splitter(t: f64) -> CoreResult<SymplecticTransform> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("transmissivity must lie in [0, 1], got {t}"));
    }
    let a = t.sqrt();
    let b = (1.0 - t).sqrt();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        a, 0.0, b, 0.0,
        0.0, a, 0.0, b,
        b, 0.0, -a, 0.0,
        0.0, b, 0.0, -a,
    ]);
    Ok(SymplecticTransform::raw(m))
}

fn rotation(phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

pub fn phase_shifter(phi: f64) -> CoreResult<SymplecticTransform> {
    check_finite("phase", phi)?;
    Ok(SymplecticTransform::raw(rotation(phi)))
}

/// Two-mode phase shifter splitting `phi` as `+phi/2` on mode 1 and `-phi/2` on mode 2.
pub fn symmetric_phase_shifter(phi: f64) -> CoreResult<SymplecticTransform> {
    check_finite("phase", phi)?;
    let mut m = DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&rotation(phi / 2.0));
    m.view_mut((2, 2), (2, 2)).copy_from(&rotation(-phi / 2.0));
    Ok(SymplecticTransform::raw(m))
}

pub fn squeezer(r: f64, theta: f64) -> CoreResult<SymplecticTransform> {
    if !(r >= 0.0) || !r.is_finite() {
        return domain(format!("squeezing parameter must be a finite value >= 0, got {r}"));
    }
    check_finite("squeezing angle", theta)?;
    let (ch, sh) = (r.cosh(), r.sinh());
    let (s, c) = theta.sin_cos();
    let m = DMatrix::from_row_slice(2, 2, &[ch + c * sh, s * sh, s * sh, ch - c * sh]);
    Ok(SymplecticTransform::raw(m))
}

/// Squeezer parameterized by its gain `G = cosh²r`.
pub fn squeezer_from_gain(gain: f64) -> CoreResult<SymplecticTransform> {
    if !(gain >= 1.0) || !gain.is_finite() {
        return domain(format!("gain must be a finite value >= 1, got {gain}"));
    }
    let root = gain.sqrt();
    let excess = (gain - 1.0).sqrt();
    let m = DMatrix::from_row_slice(2, 2, &[root + excess, 0.0, 0.0, root - excess]);
    Ok(SymplecticTransform::raw(m))
}

pub fn two_mode_squeezer(r: f64, theta: f64) -> CoreResult<SymplecticTransform> {
    if !(r >= 0.0) || !r.is_finite() {
        return domain(format!("squeezing parameter must be a finite value >= 0, got {r}"));
    }
    check_finite("squeezing angle", theta)?;
    let ch = r.cosh();
    let g = r.sinh() * theta.cos();
    let d = r.sinh() * theta.sin();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        ch, 0.0, g, d,
        0.0, ch, d, -g,
        g, d, ch, 0.0,
        d, -g, 0.0, ch,
    ]);
    Ok(SymplecticTransform::raw(m))
}

/// Displacement by `|α| e^{iθ}`: identity matrix with shift `√2 |α| (cos θ, sin θ)`.
pub fn displacement(amplitude: f64, theta: f64) -> CoreResult<SymplecticTransform> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return domain(format!("displacement amplitude must be finite and >= 0, got {amplitude}"));
    }
    check_finite("displacement angle", theta)?;
    let s = std::f64::consts::SQRT_2 * amplitude;
    Ok(SymplecticTransform {
        matrix: DMatrix::identity(2, 2),
        shift: Some(DVector::from_vec(vec![s * theta.cos(), s * theta.sin()])),
    })
}

/// Block-diagonal combination; the first part acts on mode 1.
pub fn direct_sum(parts: &[SymplecticTransform]) -> CoreResult<SymplecticTransform> {
    if parts.is_empty() {
        return domain("direct sum of an empty list");
    }
    let n: usize = parts.iter().map(|p| p.dim()).sum();
    let mut matrix = DMatrix::zeros(n, n);
    let mut shift = DVector::zeros(n);
    let mut any_shift = false;
    let mut at = 0;
    for p in parts {
        let d = p.dim();
        matrix.view_mut((at, at), (d, d)).copy_from(&p.matrix);
        if let Some(s) = &p.shift {
            shift.rows_mut(at, d).copy_from(s);
            any_shift = true;
        }
        at += d;
    }
    Ok(SymplecticTransform { matrix, shift: any_shift.then_some(shift) })
}

/// `outer ∘ inner`: the inner transform acts first.
pub fn compose(outer: &SymplecticTransform, inner: &SymplecticTransform) -> CoreResult<SymplecticTransform> {
    if outer.dim() != inner.dim() {
        return Err(CoreError::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
    }
    let matrix = &outer.matrix * &inner.matrix;
    let shift = match (&outer.shift, &inner.shift) {
        (None, None) => None,
        (o, i) => {
            let mut s = match i {
                Some(i) => &outer.matrix * i,
                None => DVector::zeros(outer.dim()),
            };
            if let Some(o) = o {
                s += o;
            }
            Some(s)
        }
    };
    Ok(SymplecticTransform { matrix, shift })
}

/// Mach-Zehnder chain `BS(1/2) · PS₂(φ) · BS(1/2)`.
pub fn mach_zehnder(phi: f64) -> CoreResult<SymplecticTransform> {
    let bs = beam_splitter(0.5)?;
    let ps = symmetric_phase_shifter(phi)?;
    compose(&bs, &compose(&ps, &bs)?)
}
