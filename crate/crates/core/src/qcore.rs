//! Two-qubit kernel: game states, floored measurement effects, Eisert
//! unitaries, Born probabilities and the ebit measure of entanglement.
//!
//! Everything is fixed-size: 2×2 and 4×4 complex arrays, basis order
//! |00⟩, |01⟩, |10⟩, |11⟩ with the first factor belonging to the first player.

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{check_range, Error, Result};

pub type Mat2 = [[C64; 2]; 2];
type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

const HERMITIAN_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;

pub const IDENTITY2: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

fn add2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][c] + b[r][c];
        }
    }
    out
}

fn scale2(s: f64, a: &Mat2) -> Mat2 {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn adjoint2(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (ar, arow) in a.iter().enumerate() {
        for (ac, &av) in arow.iter().enumerate() {
            for (br, brow) in b.iter().enumerate() {
                for (bc, &bv) in brow.iter().enumerate() {
                    out[2 * ar + br][2 * ac + bc] = av * bv;
                }
            }
        }
    }
    out
}

fn apply4(m: &Mat4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

fn max_deviation(a: &Mat2, b: &Mat2) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            dev = dev.max((a[r][c] - b[r][c]).norm());
        }
    }
    dev
}

/// Pure two-qubit state with unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [C64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    pub fn amps(&self) -> &[C64; 4] {
        &self.amps
    }
}

/// cos(γ/2)|00⟩ + sin(γ/2)|11⟩ for γ ∈ [0, π/2].
pub fn chsh_state(gamma: f64) -> Result<TwoQubitState> {
    check_range("gamma", gamma, 0.0, FRAC_PI_2)?;
    let (s, c) = (gamma / 2.0).sin_cos();
    TwoQubitState::new([C64::new(c, 0.0), ZERO, ZERO, C64::new(s, 0.0)])
}

/// A two-outcome measurement element: Hermitian with spectrum in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    m: Mat2,
}

impl Effect {
    pub fn new(m: Mat2) -> Result<Self> {
        let dev = max_deviation(&m, &adjoint2(&m));
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let effect = Self { m };
        let (lo, hi) = effect.eigenvalues();
        if lo < -HERMITIAN_TOL || hi > 1.0 + HERMITIAN_TOL {
            return Err(Error::NotAnEffect(lo, hi));
        }
        Ok(effect)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let half_gap = ((a - d) * (a - d) / 4.0 + self.m[0][1].norm_sqr()).sqrt();
        let mean = (a + d) / 2.0;
        (mean - half_gap, mean + half_gap)
    }
}

/// O(θ, φ) = sinθ cosφ X + sinθ sinφ Y + cosθ Z.
pub fn observable(theta: f64, phi: f64) -> Mat2 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    add2(
        &add2(&scale2(st * cp, &PAULI_X), &scale2(st * sp, &PAULI_Y)),
        &scale2(ct, &PAULI_Z),
    )
}

/// Floored effects for the +1 (bit 0) and −1 (bit 1) outcomes of O(θ, φ):
/// (1−ε)P± + (ε/2)I with P± = (I ± O)/2.
pub fn observable_effects(theta: f64, phi: f64, eps: f64) -> Result<(Effect, Effect)> {
    check_range("theta", theta, 0.0, PI)?;
    check_range("phi", phi, 0.0, 2.0 * PI)?;
    if phi >= 2.0 * PI {
        return Err(Error::OutOfRange {
            name: "phi",
            value: phi,
            lo: 0.0,
            hi: 2.0 * PI,
        });
    }
    check_eps(eps)?;
    let o = observable(theta, phi);
    let floor = scale2(eps / 2.0, &IDENTITY2);
    let plus = add2(&scale2((1.0 - eps) / 2.0, &add2(&IDENTITY2, &o)), &floor);
    let minus = add2(
        &scale2((1.0 - eps) / 2.0, &add2(&IDENTITY2, &scale2(-1.0, &o))),
        &floor,
    );
    Ok((Effect::new(plus)?, Effect::new(minus)?))
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    check_range("eps", eps, 0.0, 1.0)?;
    if eps >= 1.0 {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// ⟨ψ|(ea ⊗ eb)|ψ⟩, clamped to [0, 1].
pub fn born_joint(state: &TwoQubitState, ea: &Effect, eb: &Effect) -> Result<f64> {
    let op = kron(&ea.m, &eb.m);
    let v = apply4(&op, &state.amps);
    let p: C64 = state
        .amps
        .iter()
        .zip(v.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    if p.im.abs() > IMAG_TOL {
        return Err(Error::ComplexProbability(p.im));
    }
    Ok(p.re.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: Mat2,
}

impl Unitary2 {
    pub fn new(m: Mat2) -> Result<Self> {
        let dev = max_deviation(&mul2(&m, &adjoint2(&m)), &IDENTITY2);
        if dev > 1e-12 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }
}

/// U(θ, φ) = [[e^{iφ} cos(θ/2), sin(θ/2)], [−sin(θ/2), e^{−iφ} cos(θ/2)]].
pub fn eisert_unitary(theta: f64, phi: f64) -> Result<Unitary2> {
    check_range("theta", theta, 0.0, PI)?;
    check_range("phi", phi, 0.0, FRAC_PI_2)?;
    let (s, c) = (theta / 2.0).sin_cos();
    let phase = C64::from_polar(1.0, phi);
    Unitary2::new([
        [phase * c, C64::new(s, 0.0)],
        [C64::new(-s, 0.0), phase.conj() * c],
    ])
}

/// Defect analog U(π, ·) = iY, written out exactly.
const EISERT_D: Mat2 = [[ZERO, ONE], [C64::new(-1.0, 0.0), ZERO]];

/// Computational-basis outcome probabilities of J†(ua⊗ub)J|00⟩ with
/// J = exp(−iγ D⊗D/2), floored to (1−ε)p + ε/4. Index = 2·a_bit + b_bit.
pub fn epd_outcome_probs(gamma: f64, ua: &Unitary2, ub: &Unitary2, eps: f64) -> Result<[f64; 4]> {
    check_range("gamma", gamma, 0.0, FRAC_PI_2)?;
    check_eps(eps)?;
    // (D⊗D)² = I, so exp(−iγ D⊗D/2) = cos(γ/2) I − i sin(γ/2) D⊗D.
    let dd = kron(&EISERT_D, &EISERT_D);
    let (s, c) = (gamma / 2.0).sin_cos();
    let mut j = [[ZERO; 4]; 4];
    let mut j_dag = [[ZERO; 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            let id = if r == col { c } else { 0.0 };
            j[r][col] = C64::new(id, 0.0) - I * s * dd[r][col];
        }
    }
    for r in 0..4 {
        for col in 0..4 {
            j_dag[r][col] = j[col][r].conj();
        }
    }
    let start = [ONE, ZERO, ZERO, ZERO];
    let psi = apply4(&j, &start);
    let psi = apply4(&kron(&ua.m, &ub.m), &psi);
    let psi = apply4(&j_dag, &psi);
    let mut probs = [0.0; 4];
    for (p, a) in probs.iter_mut().zip(psi.iter()) {
        *p = (1.0 - eps) * a.norm_sqr() + eps / 4.0;
    }
    Ok(probs)
}

/// Binary entropy in bits; H₂(0) = H₂(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Entanglement entropy of the game state, H₂(sin²(γ/2)).
pub fn ebits_of_gamma(gamma: f64) -> Result<f64> {
    check_range("gamma", gamma, 0.0, FRAC_PI_2)?;
    Ok(ebits_unchecked(gamma))
}

fn ebits_unchecked(gamma: f64) -> f64 {
    let s = (gamma / 2.0).sin();
    binary_entropy(s * s)
}

/// Inverse of [`ebits_of_gamma`] by bisection on [0, π/2].
pub fn gamma_of_ebits(ebits: f64) -> Result<f64> {
    check_range("ebits", ebits, 0.0, 1.0)?;
    if ebits == 0.0 {
        return Ok(0.0);
    }
    if ebits == 1.0 {
        return Ok(FRAC_PI_2);
    }
    let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
    // Bisect to floating-point resolution; the map is flat near π/2, so a
    // residual test alone would stop early there.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ebits_unchecked(mid) < ebits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = (
        (ebits_unchecked(lo) - ebits).abs(),
        (ebits_unchecked(hi) - ebits).abs(),
    );
    Ok(if rl <= rh { lo } else { hi })
}

/// A game-state entanglement level carried in both parameterizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntLevel {
    pub gamma: f64,
    pub ebits: f64,
}

impl EntLevel {
    pub fn from_ebits(ebits: f64) -> Result<Self> {
        Ok(Self {
            gamma: gamma_of_ebits(ebits)?,
            ebits,
        })
    }

    pub fn from_gamma(gamma: f64) -> Result<Self> {
        Ok(Self {
            gamma,
            ebits: ebits_of_gamma(gamma)?,
        })
    }
}

/// Entanglement levels at 0.0, 0.1, …, 1.0 ebits.
#[derive(Debug, Clone, PartialEq)]
pub struct EntGrid {
    levels: Vec<EntLevel>,
}

pub const N_ENT_LEVELS: usize = 11;

impl EntGrid {
    pub fn standard() -> Self {
        let levels = (0..N_ENT_LEVELS)
            .map(|k| EntLevel::from_ebits(k as f64 / 10.0).expect("grid ebits are in range"))
            .collect();
        Self { levels }
    }

    pub fn levels(&self) -> &[EntLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, idx: usize) -> EntLevel {
        self.levels[idx]
    }

    /// Grid index of an ebit value, if it lies on the grid (within 1e-9).
    pub fn index_of_ebits(&self, ebits: f64) -> Option<usize> {
        self.levels
            .iter()
            .position(|l| (l.ebits - ebits).abs() <= 1e-9)
    }
}

impl Default for EntGrid {
    fn default() -> Self {
        Self::standard()
    }
}
