//! Qubit channels as affine maps of the Bloch ball.
//!
//! A channel acts on Stokes vectors as `r -> L r + c`. Pauli channels
//! `rho -> sum_s p_s sigma_s rho sigma_s` are the diagonal, unshifted case and
//! keep their probabilities alongside the affine form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{DensityMatrix, PureState};
use crate::matrix::{c, hermitian_eigenvalues, ComplexMatrix, FactoredDims, C64};

const BALL_TOL: f64 = 1e-12;
const OUTPUT_BALL_TOL: f64 = 1e-9;
const PROB_TOL: f64 = 1e-12;
pub const CPTP_TOL: f64 = 1e-10;

/// Stokes vector `(x, y, z)` of a qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub const ORIGIN: BlochPoint = BlochPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = Self { x, y, z };
        let n = p.norm();
        if !n.is_finite() || n > 1.0 + BALL_TOL {
            return Err(Error::OutsideBlochBall(n));
        }
        Ok(p)
    }

    pub const fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new_unchecked(a[0], a[1], a[2])
    }

    /// Unit vector at polar angle `theta` from +z and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new_unchecked(st * cp, st * sp, ct)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn add(self, o: Self) -> Self {
        Self::new_unchecked(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new_unchecked(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new_unchecked(self.x * s, self.y * s, self.z * s)
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new_unchecked(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Projection onto the unit sphere; the origin maps to the north pole.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return Self::new_unchecked(0.0, 0.0, 1.0);
        }
        self.scale(1.0 / n)
    }

    /// Great-circle angle between the directions of two nonzero points.
    pub fn angle_to(self, o: Self) -> f64 {
        let cr = self.cross(o).norm();
        cr.atan2(self.dot(o))
    }

    /// Polar angle from +z and azimuth, in radians.
    pub fn angles(self) -> (f64, f64) {
        let n = self.norm();
        let theta = if n == 0.0 { 0.0 } else { (self.z / n).clamp(-1.0, 1.0).acos() };
        (theta, self.y.atan2(self.x))
    }
}

/// `rho = (I + x X + y Y + z Z) / 2`.
pub fn stokes_matrix(p: BlochPoint) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = c(0.5 * (1.0 + p.z), 0.0);
    m[(1, 1)] = c(0.5 * (1.0 - p.z), 0.0);
    m[(0, 1)] = c(0.5 * p.x, -0.5 * p.y);
    m[(1, 0)] = c(0.5 * p.x, 0.5 * p.y);
    m
}

pub fn stokes_density(p: BlochPoint) -> Result<DensityMatrix> {
    let n = p.norm();
    if !n.is_finite() || n > 1.0 + BALL_TOL {
        return Err(Error::OutsideBlochBall(n));
    }
    Ok(DensityMatrix::from_parts_unchecked(stokes_matrix(p), FactoredDims::single(2)))
}

/// Stokes coefficients `Tr(sigma_j m)` of any 2x2 matrix (real parts).
pub fn matrix_to_stokes(m: &ComplexMatrix) -> BlochPoint {
    BlochPoint::new_unchecked(
        (m[(0, 1)] + m[(1, 0)]).re,
        (m[(1, 0)] - m[(0, 1)]).im,
        (m[(0, 0)] - m[(1, 1)]).re,
    )
}

pub fn density_to_stokes(rho: &DensityMatrix) -> Result<BlochPoint> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("expected a qubit, got dimension {}", rho.dim())));
    }
    Ok(matrix_to_stokes(rho.matrix()))
}

/// Probabilities of the identity and the three Pauli Kraus operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliProbs {
    pub p0: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliProbs {
    pub fn new(p0: f64, px: f64, py: f64, pz: f64) -> Result<Self> {
        let p = [p0, px, py, pz];
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidProbabilities(format!("negative or non-finite entry in {p:?}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!("{p:?} sums to {s}")));
        }
        Ok(Self { p0, px, py, pz })
    }

    pub fn as_array(self) -> [f64; 4] {
        [self.p0, self.px, self.py, self.pz]
    }

    /// Semi-axes of the output ellipsoid along x, y and z.
    pub fn axis_radii(self) -> [f64; 3] {
        let Self { p0, px, py, pz } = self;
        [p0 + px - py - pz, p0 + py - px - pz, p0 + pz - px - py]
    }

    /// `p0+pz-px-py >= |p0+py-px-pz|` and `>= |p0+px-py-pz|`.
    pub fn king_ruskai(self) -> bool {
        let [lx, ly, lz] = self.axis_radii();
        lz >= ly.abs() - PROB_TOL && lz >= lx.abs() - PROB_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitChannel {
    linear: [[f64; 3]; 3],
    shift: [f64; 3],
    kraus_probs: Option<PauliProbs>,
}

impl QubitChannel {
    /// General affine map. Complete positivity is not checked here; see [`cptp_check`].
    pub fn affine(linear: [[f64; 3]; 3], shift: [f64; 3]) -> Result<Self> {
        if linear.iter().flatten().chain(&shift).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("channel has non-finite entries".into()));
        }
        Ok(Self {
            linear,
            shift,
            kraus_probs: None,
        })
    }

    pub fn diagonal(axes: [f64; 3], shift: [f64; 3]) -> Result<Self> {
        let mut l = [[0.0; 3]; 3];
        for i in 0..3 {
            l[i][i] = axes[i];
        }
        Self::affine(l, shift)
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0; 3], [0.0; 3]).expect("finite")
    }

    pub fn linear(&self) -> &[[f64; 3]; 3] {
        &self.linear
    }

    pub fn shift(&self) -> &[f64; 3] {
        &self.shift
    }

    pub fn kraus_probs(&self) -> Option<PauliProbs> {
        self.kraus_probs
    }

    /// `L r + c` without any range check.
    pub fn map_point(&self, r: BlochPoint) -> BlochPoint {
        let r = r.to_array();
        let mut out = self.shift;
        for (i, o) in out.iter_mut().enumerate() {
            *o += (0..3).map(|j| self.linear[i][j] * r[j]).sum::<f64>();
        }
        BlochPoint::from_array(out)
    }

    /// Image of a Bloch point, rejecting outputs that leave the ball.
    pub fn apply_point(&self, r: BlochPoint) -> Result<BlochPoint> {
        let out = self.map_point(r);
        let n = out.norm();
        if n > 1.0 + OUTPUT_BALL_TOL {
            return Err(Error::OutsideBlochBall(n));
        }
        Ok(out)
    }

    /// Action on an arbitrary 2x2 matrix, extended linearly from the affine form.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(m.dim(), 2, "qubit channel applied to a non-qubit operator");
        // m = a0 I + sum_j a_j sigma_j with complex coefficients.
        let a0 = (m[(0, 0)] + m[(1, 1)]) * 0.5;
        let a = [
            (m[(0, 1)] + m[(1, 0)]) * 0.5,
            (m[(1, 0)] - m[(0, 1)]) * c(0.0, -0.5),
            (m[(0, 0)] - m[(1, 1)]) * 0.5,
        ];
        let mut b = [C64::new(0.0, 0.0); 3];
        for (i, bi) in b.iter_mut().enumerate() {
            *bi = a0 * self.shift[i] + (0..3).map(|j| a[j] * self.linear[i][j]).sum::<C64>();
        }
        let i = c(0.0, 1.0);
        let mut out = ComplexMatrix::zeros(2);
        out[(0, 0)] = a0 + b[2];
        out[(1, 1)] = a0 - b[2];
        out[(0, 1)] = b[0] - i * b[1];
        out[(1, 0)] = b[0] + i * b[1];
        out
    }

    /// Applies the channel to tensor factor `which` (which must be a qubit).
    pub fn apply_on_factor(&self, m: &ComplexMatrix, dims: &FactoredDims, which: usize) -> Result<ComplexMatrix> {
        dims.check(m.dim())?;
        if dims.factors().get(which) != Some(&2) {
            return Err(Error::DimensionMismatch(format!("factor {which} is not a qubit")));
        }
        let stride: usize = dims.factors()[which + 1..].iter().product();
        let images: Vec<ComplexMatrix> = (0..4)
            .map(|ab| {
                let mut e = ComplexMatrix::zeros(2);
                e[(ab / 2, ab % 2)] = c(1.0, 0.0);
                self.apply_matrix(&e)
            })
            .collect();
        let n = m.dim();
        let digit = |k: usize| (k / stride) % 2;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            let (ra, rbase) = (digit(r), r - digit(r) * stride);
            for col in 0..n {
                let v = m[(r, col)];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let (ca, cbase) = (digit(col), col - digit(col) * stride);
                let img = &images[ra * 2 + ca];
                for a in 0..2 {
                    for b in 0..2 {
                        out[(rbase + a * stride, cbase + b * stride)] += img[(a, b)] * v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(Lambda (x) Lambda)(m)` on a two-qubit operator.
    pub fn apply_two_copies(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dims = FactoredDims::qubits(2);
        let once = self.apply_on_factor(m, &dims, 0)?;
        self.apply_on_factor(&once, &dims, 1)
    }

    fn write_spec(&self, name: &str) -> String {
        let mut s = String::from(name);
        match self.kraus_probs {
            Some(p) => {
                s.push_str(" pauli");
                for v in p.as_array() {
                    let _ = write!(s, " {v:.16e}");
                }
            }
            None => {
                for v in self.linear.iter().flatten().chain(&self.shift) {
                    let _ = write!(s, " {v:.16e}");
                }
            }
        }
        s
    }
}

pub fn pauli_channel(p0: f64, px: f64, py: f64, pz: f64) -> Result<QubitChannel> {
    let probs = PauliProbs::new(p0, px, py, pz)?;
    let mut ch = QubitChannel::diagonal(probs.axis_radii(), [0.0; 3])?;
    ch.kraus_probs = Some(probs);
    Ok(ch)
}

pub fn pauli_channel_from(probs: PauliProbs) -> QubitChannel {
    pauli_channel(probs.p0, probs.px, probs.py, probs.pz).expect("validated probabilities")
}

pub fn pauli_matrices() -> [ComplexMatrix; 4] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_vec(2, vec![o, one, one, o]).expect("2x2"),
        ComplexMatrix::from_vec(2, vec![o, -i, i, o]).expect("2x2"),
        ComplexMatrix::from_vec(2, vec![one, o, o, -one]).expect("2x2"),
    ]
}

/// `sum_s p_s sigma_s m sigma_s`.
pub fn apply_pauli_kraus(probs: PauliProbs, m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2);
    for (p, s) in probs.as_array().into_iter().zip(pauli_matrices()) {
        out = &out + &(&(&s * m) * &s).scale(p);
    }
    out
}

pub fn apply_channel(ch: &QubitChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let r = density_to_stokes(rho)?;
    let mut out = ch.apply_point(r)?;
    if out.norm() > 1.0 {
        out = out.normalized();
    }
    stokes_density(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    pub min_choi_eigenvalue: f64,
    pub is_cptp: bool,
}

/// Choi matrix `(Lambda (x) id)(|Omega><Omega|)` with `|Omega> = (|00> + |11>)/sqrt 2`.
pub fn choi_matrix(ch: &QubitChannel) -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    let z = c(0.0, 0.0);
    let omega = ComplexMatrix::outer(&[c(s, 0.0), z, z, c(s, 0.0)]);
    ch.apply_on_factor(&omega, &FactoredDims::qubits(2), 0)
        .expect("two-qubit operator")
}

pub fn cptp_check(ch: &QubitChannel, tol: f64) -> CptpReport {
    let choi = choi_matrix(ch);
    let min = *hermitian_eigenvalues(&choi)
        .expect("Choi matrix of a Hermiticity-preserving map")
        .last()
        .expect("nonempty");
    CptpReport {
        min_choi_eigenvalue: min,
        is_cptp: min >= -tol,
    }
}

/// `psi` and `psi_perp`, the two purifications spanning the range of the
/// Stinespring isometry applied to `|0>` and `|1>`.
#[derive(Clone, Debug)]
pub struct StinespringPair {
    pub psi: PureState,
    pub psi_perp: PureState,
}

impl StinespringPair {
    /// Output qubit first, then the 4-level environment with levels ordered 0, x, y, z.
    pub fn new(probs: PauliProbs) -> Self {
        let dims = FactoredDims::new(vec![2, 4]).expect("dimension 8");
        let amps = probs.as_array().map(f64::sqrt);
        let paulis = pauli_matrices();
        let build = |input: usize| {
            let mut v = vec![c(0.0, 0.0); 8];
            for (a, (amp, s)) in amps.iter().zip(&paulis).enumerate() {
                for o in 0..2 {
                    v[o * 4 + a] += s[(o, input)] * *amp;
                }
            }
            PureState::new(v, dims.clone()).expect("unit norm")
        };
        Self {
            psi: build(0),
            psi_perp: build(1),
        }
    }

    /// `s |psi><psi| + (1 - s) |psi_perp><psi_perp|`.
    pub fn rho_mix(&self, s: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain { value: s, domain: "[0, 1]" });
        }
        let m = &ComplexMatrix::outer(self.psi.vector()).scale(s)
            + &ComplexMatrix::outer(self.psi_perp.vector()).scale(1.0 - s);
        DensityMatrix::new(m, self.psi.dims().clone())
    }
}

pub fn stinespring_pair_state(p0: f64, px: f64, py: f64, pz: f64, s: f64) -> Result<DensityMatrix> {
    StinespringPair::new(PauliProbs::new(p0, px, py, pz)?).rho_mix(s)
}

/// `r -> (0.6x + 0.021, 0.601y, 0.5z + 0.495)`, a channel with four engaging inputs.
pub fn lambda4() -> QubitChannel {
    lambda3_prime_eps(0.021)
}

/// `r -> (0.6x, 0.6y, 0.5z + 0.5)`.
pub fn lambda3() -> QubitChannel {
    QubitChannel::diagonal([0.6, 0.6, 0.5], [0.0, 0.0, 0.5]).expect("finite")
}

/// `r -> (0.6x + eps, 0.601y, 0.5z + 0.495)`.
pub fn lambda3_prime_eps(eps: f64) -> QubitChannel {
    QubitChannel::diagonal([0.6, 0.601, 0.5], [eps, 0.0, 0.495]).expect("finite")
}

/// One named channel from a spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub name: String,
    pub channel: QubitChannel,
}

fn parse_f64(tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

/// Parses `name m_xx .. m_zz c_x c_y c_z` or `name pauli p0 px py pz`.
pub fn parse_channel_line(line: &str) -> Result<ChannelSpec> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let Some((&name, rest)) = toks.split_first() else {
        return Err(Error::Parse("empty channel line".into()));
    };
    let channel = if rest.first() == Some(&"pauli") {
        if rest.len() != 5 {
            return Err(Error::Parse(format!("pauli channel {name:?} needs 4 probabilities")));
        }
        let p: Vec<f64> = rest[1..].iter().map(|t| parse_f64(t)).collect::<Result<_>>()?;
        pauli_channel(p[0], p[1], p[2], p[3])?
    } else {
        if rest.len() != 12 {
            return Err(Error::Parse(format!(
                "affine channel {name:?} needs 12 numbers, found {}",
                rest.len()
            )));
        }
        let v: Vec<f64> = rest.iter().map(|t| parse_f64(t)).collect::<Result<_>>()?;
        let l = [[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]];
        QubitChannel::affine(l, [v[9], v[10], v[11]])?
    };
    Ok(ChannelSpec {
        name: name.to_string(),
        channel,
    })
}

/// Parses a spec file, skipping blank lines and `#` comments.
pub fn parse_channel_file(text: &str) -> Result<Vec<ChannelSpec>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_channel_line)
        .collect()
}

pub fn format_channel_line(spec: &ChannelSpec) -> String {
    spec.channel.write_spec(&spec.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn random_point(r: &mut impl Rng) -> BlochPoint {
        loop {
            let p = BlochPoint::new_unchecked(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            if p.norm() <= 1.0 {
                return p;
            }
        }
    }

    #[test]
    fn stokes_round_trip() {
        let mut r = seeded(1);
        for _ in 0..50 {
            let p = random_point(&mut r);
            let q = density_to_stokes(&stokes_density(p).unwrap()).unwrap();
            assert!(p.sub(q).norm() < 1e-14);
        }
        assert!(stokes_density(BlochPoint::new_unchecked(1.0, 1.0, 0.0)).is_err());
        let m = stokes_density(BlochPoint::ORIGIN).unwrap();
        assert!(m.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) == 0.0);
    }

    #[test]
    fn pauli_channel_forms() {
        let id = pauli_channel(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(id.linear(), QubitChannel::identity().linear());
        let dep = pauli_channel(0.25, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(dep.linear(), &[[0.0; 3]; 3]);
        let ch = pauli_channel(0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0).unwrap();
        for i in 0..3 {
            assert!((ch.linear()[i][i] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(pauli_channel(0.5, 0.5, 0.5, -0.5).is_err());
        assert!(pauli_channel(0.5, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn pauli_and_affine_paths_agree() {
        let mut r = seeded(2);
        for _ in 0..100 {
            let mut p: [f64; 4] = [r.random(), r.random(), r.random(), r.random()];
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= s);
            let probs = PauliProbs::new(p[0], p[1], p[2], 1.0 - p[0] - p[1] - p[2]).unwrap();
            let ch = pauli_channel_from(probs);
            let rho = stokes_density(random_point(&mut r)).unwrap();
            let a = apply_channel(&ch, &rho).unwrap();
            let b = apply_pauli_kraus(probs, rho.matrix());
            assert!(a.matrix().max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn lambda4_maps_center() {
        let out = lambda4().apply_point(BlochPoint::ORIGIN).unwrap();
        assert_eq!(out.to_array(), [0.021, 0.0, 0.495]);
    }

    #[test]
    fn choi_checks() {
        let id = cptp_check(&QubitChannel::identity(), CPTP_TOL);
        assert!(id.is_cptp && id.min_choi_eigenvalue.abs() < 1e-14);
        assert!(!cptp_check(&lambda3_prime_eps(0.06), CPTP_TOL).is_cptp);
        assert!(cptp_check(&lambda4(), CPTP_TOL).is_cptp);
        // Transpose map is positive but not completely positive.
        let t = QubitChannel::diagonal([1.0, -1.0, 1.0], [0.0; 3]).unwrap();
        assert!(!cptp_check(&t, CPTP_TOL).is_cptp);
    }

    #[test]
    fn stinespring_basics() {
        let pair = StinespringPair::new(PauliProbs::new(0.4, 0.3, 0.2, 0.1).unwrap());
        assert!(pair.psi.inner(&pair.psi_perp).unwrap().norm() < 1e-15);
        let rho = pair.psi.density();
        let out = rho.partial_trace(&[0]).unwrap();
        let ch = pauli_channel(0.4, 0.3, 0.2, 0.1).unwrap();
        let want = ch.apply_matrix(&ComplexMatrix::from_diag(&[1.0, 0.0]));
        assert!(out.matrix().max_abs_diff(&want) < 1e-15);

        let trivial = stinespring_pair_state(1.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        let mut want = ComplexMatrix::zeros(8);
        want[(0, 0)] = c(0.5, 0.0);
        want[(4, 4)] = c(0.5, 0.0);
        assert_eq!(trivial.matrix(), &want);
        assert!(stinespring_pair_state(1.0, 0.0, 0.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn spec_lines_round_trip() {
        let text = "# test\nl4 0.6 0 0 0 0.601 0 0 0 0.5 0.021 0 0.495\n\ndep pauli 0.5 0.1666 0.1667 0.1667\n";
        let specs = parse_channel_file(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].channel, lambda4());
        for s in &specs {
            let back = parse_channel_line(&format_channel_line(s)).unwrap();
            assert_eq!(&back, s);
        }
        assert!(parse_channel_line("bad 1 2 3").is_err());
        assert!(parse_channel_line("bad pauli 0.5 0.5 x 0").is_err());
    }
}
