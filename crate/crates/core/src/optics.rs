//! Unitary models of the bench components: wave plates, mode converters,
//! Dove prisms, q-plates and the Sagnac composite, plus the initial-state
//! preparation pipeline from |H,0>.
//!
//! Coin-space elements return 4x4 unitaries in the fixed [H+, H-, V+, V-]
//! basis. The q-plate changes |m| and therefore lives on the extended
//! 6-dimensional space {H,V} x {m = -1, 0, +1}.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::coins::{grover4, hadamard4, CoinOperator};
use crate::error::{Error, Result};
use crate::matrix::{
    basis, coin_norm_sq, tensor2x2, C64, CoinVec, SquareMatrix, TOL_ALGEBRAIC,
};

/// A physical optical element with its parameters. Angles are in radians.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    HalfWavePlate { angle: f64 },
    QuarterWavePlate { angle: f64 },
    /// pi-mode converter: Hadamard-type rotation on the OAM {+,-} factor.
    ModeConverterPi,
    DovePrism { angle: f64, l_magnitude: i64 },
    /// Charge q must be a nonzero half-integer.
    QPlate { charge: f64 },
    PolarizationRotator { angle: f64 },
}

impl OpticalElement {
    fn validate(&self) -> Result<()> {
        match *self {
            OpticalElement::HalfWavePlate { angle }
            | OpticalElement::QuarterWavePlate { angle }
            | OpticalElement::PolarizationRotator { angle } => {
                if !angle.is_finite() {
                    return Err(Error::BadElement("angle must be finite".into()));
                }
            }
            OpticalElement::ModeConverterPi => {}
            OpticalElement::DovePrism { angle, l_magnitude } => {
                if !angle.is_finite() {
                    return Err(Error::BadElement("angle must be finite".into()));
                }
                if l_magnitude < 1 {
                    return Err(Error::BadElement("l magnitude must be >= 1".into()));
                }
            }
            OpticalElement::QPlate { charge } => {
                let two_q = 2.0 * charge;
                if !charge.is_finite() || two_q == 0.0 || (two_q - two_q.round()).abs() > 1e-12 {
                    return Err(Error::BadElement(
                        "q-plate charge must be a nonzero half-integer".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Fixed polarization basis states in H/V coordinates.
pub mod pol_bases {
    use super::C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn d() -> [C64; 2] {
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)]
    }
    pub fn a() -> [C64; 2] {
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)]
    }
    pub fn r() -> [C64; 2] {
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2)]
    }
    pub fn l() -> [C64; 2] {
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)]
    }
}

/// 2x2 Jones matrix of an ideal half-wave plate with fast axis at `angle`.
pub fn half_wave_plate_jones(angle: f64) -> SquareMatrix {
    let c = (2.0 * angle).cos();
    let s = (2.0 * angle).sin();
    SquareMatrix::from_real_rows(&[&[c, s], &[s, -c]]).expect("finite")
}

/// 2x2 Jones matrix of an ideal quarter-wave plate with fast axis at `angle`.
pub fn quarter_wave_plate_jones(angle: f64) -> SquareMatrix {
    let p = C64::from_polar(1.0, -FRAC_PI_4);
    let (c, s) = (angle.cos(), angle.sin());
    let i = C64::new(0.0, 1.0);
    let one_minus_i = C64::new(1.0, -1.0);
    SquareMatrix::from_fn(2, |r, col| {
        p * match (r, col) {
            (0, 0) => C64::new(c * c, 0.0) + i * s * s,
            (1, 1) => C64::new(s * s, 0.0) + i * c * c,
            _ => one_minus_i * s * c,
        }
    })
    .expect("finite")
}

fn rotator_jones(angle: f64) -> SquareMatrix {
    let (c, s) = (angle.cos(), angle.sin());
    SquareMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("finite")
}

/// 4x4 Dove-prism action on the coin space.
///
/// One matrix covers both arms of a counter-propagating loop: the phase sign
/// asymmetry between the H rows (e^{-+2il theta}) and the V rows
/// (-e^{+-2il theta}) is the direction dependence.
pub fn dove_prism_matrix(theta: f64, l_magnitude: i64) -> SquareMatrix {
    let lt = 2.0 * l_magnitude as f64 * theta;
    let mut m = SquareMatrix::zeros(4).expect("dim 4");
    // columns are images of the basis states
    m.set(basis::H_MINUS, basis::H_PLUS, C64::from_polar(1.0, -lt));
    m.set(basis::H_PLUS, basis::H_MINUS, C64::from_polar(1.0, lt));
    m.set(basis::V_MINUS, basis::V_PLUS, -C64::from_polar(1.0, lt));
    m.set(basis::V_PLUS, basis::V_MINUS, -C64::from_polar(1.0, -lt));
    m
}

fn pol_to_circular() -> SquareMatrix {
    // columns |L>, |R> in H/V coordinates
    SquareMatrix::from_fn(2, |r, c| match (r, c) {
        (0, _) => C64::new(FRAC_1_SQRT_2, 0.0),
        (1, 0) => C64::new(0.0, FRAC_1_SQRT_2),
        _ => C64::new(0.0, -FRAC_1_SQRT_2),
    })
    .expect("finite")
}

/// 6x6 q-plate unitary on {H,V} x {m=-1,0,+1}.
///
/// In the circular basis the plate enacts |L,m> -> |R,m+2q> and
/// |R,m> -> |L,m-2q|>; ladder states whose image leaves the m truncation are
/// mapped to themselves, keeping the matrix unitary. Use [`apply_q_plate`]
/// to reject states that populate those leaky rungs.
pub fn q_plate_matrix(charge: f64) -> Result<SquareMatrix> {
    OpticalElement::QPlate { charge }.validate()?;
    let two_q = (2.0 * charge).round() as i32;
    // circular-basis layout: index = s*3 + (m+1), s = 0 for L, 1 for R
    let idx = |s: usize, m: i32| s * 3 + (m + 1) as usize;
    let mut lr = SquareMatrix::zeros(6)?;
    for m in -1..=1 {
        let up = m + two_q;
        if (-1..=1).contains(&up) {
            lr.set(idx(1, up), idx(0, m), C64::new(1.0, 0.0)); // L,m -> R,m+2q
        } else {
            lr.set(idx(0, m), idx(0, m), C64::new(1.0, 0.0));
        }
        let down = m - two_q;
        if (-1..=1).contains(&down) {
            lr.set(idx(0, down), idx(1, m), C64::new(1.0, 0.0)); // R,m -> L,m-2q
        } else {
            lr.set(idx(1, m), idx(1, m), C64::new(1.0, 0.0));
        }
    }
    // conjugate into the H/V polarization basis
    let p = pol_on_extended_from2(&pol_to_circular());
    p.mul(&lr)?.mul(&p.dagger())
}

/// Lifts a 2x2 polarization operator to the 6-dimensional extended space.
fn pol_on_extended_from2(u: &SquareMatrix) -> SquareMatrix {
    SquareMatrix::from_fn(6, |r, c| {
        if r % 3 == c % 3 {
            u.at(r / 3, c / 3)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .expect("finite")
}

/// Compiles an element to its natural-space unitary: 4x4 on the coin space
/// for everything except the q-plate, which returns its 6x6 extended-space
/// matrix.
pub fn element_unitary(e: &OpticalElement) -> Result<SquareMatrix> {
    e.validate()?;
    let i2 = SquareMatrix::identity(2)?;
    match *e {
        OpticalElement::HalfWavePlate { angle } => tensor2x2(&half_wave_plate_jones(angle), &i2),
        OpticalElement::QuarterWavePlate { angle } => {
            tensor2x2(&quarter_wave_plate_jones(angle), &i2)
        }
        OpticalElement::PolarizationRotator { angle } => tensor2x2(&rotator_jones(angle), &i2),
        OpticalElement::ModeConverterPi => tensor2x2(&i2, &crate::coins::h2()),
        OpticalElement::DovePrism { angle, l_magnitude } => {
            Ok(dove_prism_matrix(angle, l_magnitude))
        }
        OpticalElement::QPlate { charge } => q_plate_matrix(charge),
    }
}

/// Like [`element_unitary`] but restricted to the 4-dimensional coin space;
/// a q-plate is rejected because it changes |m|.
pub fn coin_space_unitary(e: &OpticalElement) -> Result<SquareMatrix> {
    if matches!(e, OpticalElement::QPlate { .. }) {
        return Err(Error::QPlateOnCoinSpace);
    }
    element_unitary(e)
}

/// 6 amplitudes over {H,V} x {m = -1, 0, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState(pub [C64; 6]);

impl ExtendedState {
    /// Embeds a coin state into the extended space (m = +-1 rungs).
    pub fn from_coin(v: &CoinVec) -> Self {
        let mut amps = [C64::new(0.0, 0.0); 6];
        amps[basis::ext_index(0, 1)] = v[basis::H_PLUS];
        amps[basis::ext_index(0, -1)] = v[basis::H_MINUS];
        amps[basis::ext_index(1, 1)] = v[basis::V_PLUS];
        amps[basis::ext_index(1, -1)] = v[basis::V_MINUS];
        Self(amps)
    }

    /// |H, m=0> with zero OAM, the bench source state.
    pub fn h_zero() -> Self {
        let mut amps = [C64::new(0.0, 0.0); 6];
        amps[basis::ext_index(0, 0)] = C64::new(1.0, 0.0);
        Self(amps)
    }

    /// Restricts to the coin space; errors if any amplitude lives on m = 0.
    pub fn to_coin(&self) -> Result<CoinVec> {
        let leak = self.0[basis::ext_index(0, 0)].norm_sqr()
            + self.0[basis::ext_index(1, 0)].norm_sqr();
        if leak > TOL_ALGEBRAIC {
            return Err(Error::TruncationLeak(basis::ext_index(0, 0)));
        }
        Ok([
            self.0[basis::ext_index(0, 1)],
            self.0[basis::ext_index(0, -1)],
            self.0[basis::ext_index(1, 1)],
            self.0[basis::ext_index(1, -1)],
        ])
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn apply(&self, u: &SquareMatrix) -> Self {
        let out = u.apply(&self.0);
        Self([out[0], out[1], out[2], out[3], out[4], out[5]])
    }
}

/// Applies a q-plate to an extended state, rejecting any amplitude sitting on
/// a ladder rung whose image would leave the m in {-1,0,+1} truncation.
pub fn apply_q_plate(state: &ExtendedState, charge: f64) -> Result<ExtendedState> {
    let two_q = (2.0 * charge).round() as i32;
    let p = pol_on_extended_from2(&pol_to_circular());
    let lr = p.dagger().apply(&state.0);
    let idx = |s: usize, m: i32| s * 3 + (m + 1) as usize;
    for m in -1..=1 {
        if !(-1..=1).contains(&(m + two_q)) && lr[idx(0, m)].norm_sqr() > TOL_ALGEBRAIC {
            return Err(Error::TruncationLeak(idx(0, m)));
        }
        if !(-1..=1).contains(&(m - two_q)) && lr[idx(1, m)].norm_sqr() > TOL_ALGEBRAIC {
            return Err(Error::TruncationLeak(idx(1, m)));
        }
    }
    Ok(state.apply(&q_plate_matrix(charge)?))
}

/// Input rotation into the Sagnac loop: H -> D, V -> A on polarization.
pub fn sagnac_input_rotation() -> SquareMatrix {
    tensor2x2(&crate::coins::h2(), &SquareMatrix::identity(2).expect("dim 2"))
        .expect("static matrix")
}

/// Fixed post-loop rotation, one single-qubit factor per subsystem.
///
/// Solved so that post * Dove(pi/8) * input equals U_SI up to a global
/// e^{-i pi/4}: the polarization factor maps R -> H and L -> V, the OAM
/// factor flips +/- with a -i on one arm.
pub fn sagnac_post_rotation() -> SquareMatrix {
    let p_pol = SquareMatrix::from_fn(2, |r, c| match (r, c) {
        (0, 0) | (1, 0) => C64::new(FRAC_1_SQRT_2, 0.0),
        (0, 1) => C64::new(0.0, FRAC_1_SQRT_2),
        _ => C64::new(0.0, -FRAC_1_SQRT_2),
    })
    .expect("finite");
    let p_oam = SquareMatrix::from_fn(2, |r, c| match (r, c) {
        (0, 1) => C64::new(1.0, 0.0),
        (1, 0) => C64::new(0.0, -1.0),
        _ => C64::new(0.0, 0.0),
    })
    .expect("finite");
    tensor2x2(&p_pol, &p_oam).expect("static matrix")
}

/// The modeled Sagnac pipeline compiled to a single coin-space unitary:
/// input H->D/V->A rotation, counter-propagating Dove-prism pass, fixed
/// post-rotation. At theta = pi/8 this equals U_SI up to global phase.
pub fn sagnac_composite(theta: f64) -> Result<CoinOperator> {
    if !theta.is_finite() {
        return Err(Error::BadElement("angle must be finite".into()));
    }
    let m = sagnac_post_rotation()
        .mul(&dove_prism_matrix(theta, 1))?
        .mul(&sagnac_input_rotation())?;
    CoinOperator::new("sagnac_composite", m)
}

/// Result of compiling an initial-state preparation pipeline.
#[derive(Debug, Clone)]
pub struct Preparation {
    /// Bench elements applied to |H,0>, in order.
    pub elements: Vec<OpticalElement>,
    /// The U(4) operation left to the bench designer after the pipeline has
    /// reached |H,+>.
    pub residual: SquareMatrix,
    /// The state the full pipeline actually produces.
    pub achieved: CoinVec,
}

/// Builds a pipeline taking |H,0> to `target`: QWP(-pi/4) takes H to L, a
/// q=1/2 plate lifts it to |R,+1>, a second QWP(-pi/4) lands on |H,+>
/// exactly, and the reported residual U(4) finishes the job.
pub fn prepare_initial_state(target: &CoinVec) -> Result<Preparation> {
    let norm = coin_norm_sq(target);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    let elements = vec![
        OpticalElement::QuarterWavePlate { angle: -FRAC_PI_4 },
        OpticalElement::QPlate { charge: 0.5 },
        OpticalElement::QuarterWavePlate { angle: -FRAC_PI_4 },
    ];
    let mut state = ExtendedState::h_zero();
    for e in &elements {
        state = match e {
            OpticalElement::QPlate { charge } => apply_q_plate(&state, *charge)?,
            _ => state.apply(&pol_on_extended_from2(&quarter_wave_plate_jones(-FRAC_PI_4))),
        };
    }
    let base = state.to_coin()?;
    let residual = residual_unitary(target)?;
    let achieved = residual.apply_coin(&base);
    let err = achieved
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    debug_assert!(err <= 1e-10, "pipeline missed target by {err}");
    Ok(Preparation {
        elements,
        residual,
        achieved,
    })
}

/// Picks the residual U(4): a named coin when the target is its first
/// column, otherwise a Gram-Schmidt completion with the target as column 0.
fn residual_unitary(target: &CoinVec) -> Result<SquareMatrix> {
    for cand in [
        SquareMatrix::identity(4)?,
        hadamard4().matrix,
        grover4().matrix,
    ] {
        let col0: Vec<C64> = (0..4).map(|r| cand.at(r, 0)).collect();
        let diff = col0
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if diff <= TOL_ALGEBRAIC {
            return Ok(cand);
        }
    }
    gram_schmidt_completion(target)
}

fn gram_schmidt_completion(first: &CoinVec) -> Result<SquareMatrix> {
    let mut cols: Vec<Vec<C64>> = vec![first.to_vec()];
    for k in 0..4 {
        if cols.len() == 4 {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); 4];
        v[k] = C64::new(1.0, 0.0);
        for c in &cols {
            let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            for vi in &mut v {
                *vi /= n;
            }
            cols.push(v);
        }
    }
    SquareMatrix::from_fn(4, |r, c| cols[c][r])
}

/// Verifies the fibre round trip: q-plate, `inner` on the l=0 polarization
/// subspace, reverse q-plate. Returns true iff the action restricted to the
/// coin space is unitary and matches an independently chased rule-based
/// prediction to 1e-12.
pub fn qplate_roundtrip_check(charge: f64, inner: &SquareMatrix) -> Result<bool> {
    if inner.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: inner.dim(),
        });
    }
    if !inner.is_unitary(TOL_ALGEBRAIC) {
        return Err(Error::NonUnitary("inner".into()));
    }
    let q = q_plate_matrix(charge)?;
    let embedded = SquareMatrix::from_fn(6, |r, c| {
        // inner on the m=0 block {H0, V0}, identity elsewhere
        let m0 = [basis::ext_index(0, 0), basis::ext_index(1, 0)];
        match (m0.iter().position(|&i| i == r), m0.iter().position(|&i| i == c)) {
            (Some(ri), Some(ci)) => inner.at(ri, ci),
            _ => {
                if r == c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    })?;
    let round6 = q.dagger().mul(&embedded)?.mul(&q)?;
    // restrict to the coin subspace
    let coin_ext = [
        basis::ext_index(0, 1),
        basis::ext_index(0, -1),
        basis::ext_index(1, 1),
        basis::ext_index(1, -1),
    ];
    let round4 = SquareMatrix::from_fn(4, |r, c| round6.at(coin_ext[r], coin_ext[c]))?;
    if !round4.is_unitary(TOL_ALGEBRAIC) {
        return Ok(false);
    }
    let expected = roundtrip_oracle(charge, inner)?;
    Ok(round4.max_abs_diff(&expected) <= TOL_ALGEBRAIC)
}

/// Rule-based prediction of the round trip: each coin basis state is chased
/// through the q-plate transformation rules in the circular basis, `inner`
/// is applied wherever the state visits m = 0, and the reverse rules bring
/// it back. Independent of the 6x6 matrix path above.
fn roundtrip_oracle(charge: f64, inner: &SquareMatrix) -> Result<SquareMatrix> {
    let two_q = (2.0 * charge).round() as i32;
    let l = pol_bases::l();
    let r = pol_bases::r();
    let mut out = SquareMatrix::zeros(4)?;
    let coin_m = [1, -1, 1, -1]; // OAM per coin index
    let coin_pol = [0, 0, 1, 1];
    for j in 0..4 {
        // circular decomposition of the input polarization
        let hv = [
            if coin_pol[j] == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) },
            if coin_pol[j] == 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) },
        ];
        let amp_l: C64 = l.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let amp_r: C64 = r.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        // forward pass per circular component: (s, m, amplitude)
        let mut comps: Vec<(usize, i32, C64)> = Vec::new();
        for (s, amp) in [(0usize, amp_l), (1usize, amp_r)] {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let m = coin_m[j];
            let (s2, m2) = step_qplate(s, m, two_q);
            comps.push((s2, m2, amp));
        }
        // inner acts on the H/V components of anything sitting at m = 0
        let mut after: Vec<(usize, i32, C64)> = Vec::new();
        let mut at_zero = [C64::new(0.0, 0.0); 2]; // H, V amplitudes at m=0
        for (s, m, amp) in comps {
            if m == 0 {
                let pol = if s == 0 { l } else { r };
                at_zero[0] += amp * pol[0];
                at_zero[1] += amp * pol[1];
            } else {
                after.push((s, m, amp));
            }
        }
        if at_zero[0].norm_sqr() + at_zero[1].norm_sqr() > 0.0 {
            let rotated = inner.apply(&at_zero);
            // back to circular components at m=0
            let back_l: C64 = l.iter().zip(&rotated).map(|(a, b)| a.conj() * b).sum();
            let back_r: C64 = r.iter().zip(&rotated).map(|(a, b)| a.conj() * b).sum();
            after.push((0, 0, back_l));
            after.push((1, 0, back_r));
        }
        // reverse pass and projection back onto the coin basis
        for (s, m, amp) in after {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (s2, m2) = step_qplate(s, m, two_q);
            let pol = if s2 == 0 { l } else { r };
            for (p, pv) in pol.iter().enumerate() {
                for i in 0..4 {
                    if coin_pol[i] == p && coin_m[i] == m2 {
                        out.set(i, j, out.at(i, j) + amp * pv);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One q-plate rule application in the circular basis. The rules pair the
/// ladder into disjoint transpositions (L,m <-> R,m+2q), so the plate is its
/// own inverse and the return pass applies the same map. Leaky rungs stay
/// put.
fn step_qplate(s: usize, m: i32, two_q: i32) -> (usize, i32) {
    let (s2, m2) = if s == 0 {
        (1, m + two_q) // L -> R
    } else {
        (0, m - two_q) // R -> L
    };
    if (-1..=1).contains(&m2) {
        (s2, m2)
    } else {
        (s, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::sagnac_swap;
    use crate::matrix::{equal_up_to_global_phase, states_equal_up_to_global_phase};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn elements_are_unitary() {
        let elems = [
            OpticalElement::HalfWavePlate { angle: 0.3 },
            OpticalElement::QuarterWavePlate { angle: 1.1 },
            OpticalElement::ModeConverterPi,
            OpticalElement::DovePrism { angle: FRAC_PI_8, l_magnitude: 1 },
            OpticalElement::QPlate { charge: 0.5 },
            OpticalElement::PolarizationRotator { angle: -0.7 },
        ];
        for e in elems {
            assert!(element_unitary(&e).unwrap().is_unitary(TOL_ALGEBRAIC), "{e:?}");
        }
    }

    #[test]
    fn qplate_rejected_on_coin_space() {
        assert!(matches!(
            coin_space_unitary(&OpticalElement::QPlate { charge: 0.5 }),
            Err(Error::QPlateOnCoinSpace)
        ));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(element_unitary(&OpticalElement::HalfWavePlate { angle: f64::NAN }).is_err());
        assert!(element_unitary(&OpticalElement::DovePrism { angle: 0.0, l_magnitude: 0 }).is_err());
        assert!(element_unitary(&OpticalElement::QPlate { charge: 0.3 }).is_err());
        assert!(element_unitary(&OpticalElement::QPlate { charge: 0.0 }).is_err());
    }

    #[test]
    fn dove_prism_at_pi_8() {
        // |H,+> -> e^{-i pi/4} |H,->
        let d = dove_prism_matrix(FRAC_PI_8, 1);
        let out = d.apply_coin(&crate::coins::basis_state(basis::H_PLUS));
        let expected = C64::from_polar(1.0, -FRAC_PI_4);
        assert!((out[basis::H_MINUS] - expected).norm() <= TOL_ALGEBRAIC);
    }

    #[test]
    fn dove_prism_at_zero() {
        let d = dove_prism_matrix(0.0, 1);
        let out = d.apply_coin(&crate::coins::basis_state(basis::H_PLUS));
        assert_eq!(out[basis::H_MINUS], C64::new(1.0, 0.0));
        let out = d.apply_coin(&crate::coins::basis_state(basis::V_PLUS));
        assert_eq!(out[basis::V_MINUS], C64::new(-1.0, 0.0));
    }

    #[test]
    fn sagnac_composite_matches_swap() {
        let comp = sagnac_composite(FRAC_PI_8).unwrap();
        assert!(
            equal_up_to_global_phase(&comp.matrix, &sagnac_swap().matrix, 1e-10).unwrap()
        );
    }

    #[test]
    fn sagnac_action_on_h_superposition() {
        // |H> (x) (alpha|+> + beta|->) -> alpha|H,+> + beta|V,->
        let alpha = C64::new(0.6, 0.0);
        let beta = C64::new(0.0, 0.8);
        let input = [alpha, beta, C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let out = sagnac_composite(FRAC_PI_8).unwrap().matrix.apply_coin(&input);
        let expected = [alpha, C64::new(0.0, 0.0), C64::new(0.0, 0.0), beta];
        assert!(states_equal_up_to_global_phase(&out, &expected, 1e-10).unwrap());
    }

    #[test]
    fn sagnac_intermediate_matches_loop_exit() {
        // D-input, before the post-rotation: alpha|-,R> + i beta|+,L>
        let alpha = C64::new(0.48, 0.2);
        let beta = C64::new(0.0, 0.0) + (1.0 - alpha.norm_sqr()).sqrt();
        let d = pol_bases::d();
        let input = [
            d[0] * alpha,
            d[0] * beta,
            d[1] * alpha,
            d[1] * beta,
        ];
        let out = dove_prism_matrix(FRAC_PI_8, 1).apply_coin(&input);
        let r = pol_bases::r();
        let l = pol_bases::l();
        let i = C64::new(0.0, 1.0);
        let expected = [
            i * beta * l[0],
            alpha * r[0],
            i * beta * l[1],
            alpha * r[1],
        ];
        assert!(states_equal_up_to_global_phase(&out, &expected, 1e-10).unwrap());
    }

    #[test]
    fn qplate_maps_fibre_pair_to_zero_oam() {
        // alpha|R,+> + beta|L,-> -> (alpha|L> + beta|R>) (x) |0>
        let alpha = C64::new(0.6, 0.0);
        let beta = C64::new(0.0, 0.8);
        let r = pol_bases::r();
        let l = pol_bases::l();
        // alpha|R,+1> + beta|L,-1> in the extended space
        let mut amps = [C64::new(0.0, 0.0); 6];
        amps[basis::ext_index(0, 1)] = alpha * r[0];
        amps[basis::ext_index(1, 1)] = alpha * r[1];
        amps[basis::ext_index(0, -1)] = beta * l[0];
        amps[basis::ext_index(1, -1)] = beta * l[1];
        let out = apply_q_plate(&ExtendedState(amps), 0.5).unwrap();
        let mut expected = [C64::new(0.0, 0.0); 6];
        expected[basis::ext_index(0, 0)] = alpha * l[0] + beta * r[0];
        expected[basis::ext_index(1, 0)] = alpha * l[1] + beta * r[1];
        for (a, b) in out.0.iter().zip(&expected) {
            assert!((a - b).norm() <= TOL_ALGEBRAIC, "{out:?}");
        }
    }

    #[test]
    fn qplate_rejects_leaky_amplitude() {
        // |L,+1> would go to m = +2
        let l = pol_bases::l();
        let mut amps = [C64::new(0.0, 0.0); 6];
        amps[basis::ext_index(0, 1)] = l[0];
        amps[basis::ext_index(1, 1)] = l[1];
        assert!(matches!(
            apply_q_plate(&ExtendedState(amps), 0.5),
            Err(Error::TruncationLeak(_))
        ));
    }

    #[test]
    fn roundtrip_identity_and_phase() {
        let id = SquareMatrix::identity(2).unwrap();
        assert!(qplate_roundtrip_check(0.5, &id).unwrap());
        let delayed = id.scale(C64::from_polar(1.0, 0.77)).unwrap();
        assert!(qplate_roundtrip_check(0.5, &delayed).unwrap());
        let bad = id.scale(C64::new(2.0, 0.0)).unwrap();
        assert!(matches!(
            qplate_roundtrip_check(0.5, &bad),
            Err(Error::NonUnitary(_))
        ));
    }

    #[test]
    fn prepare_basis_state() {
        let prep = prepare_initial_state(&crate::coins::basis_state(0)).unwrap();
        assert!(!prep.elements.is_empty());
        assert!(equal_up_to_global_phase(
            &prep.residual,
            &SquareMatrix::identity(4).unwrap(),
            TOL_ALGEBRAIC
        )
        .unwrap());
        assert!((prep.achieved[0] - C64::new(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn prepare_phi2_residual_is_hadamard() {
        let prep = prepare_initial_state(&crate::coins::phi2()).unwrap();
        assert_eq!(prep.residual.max_abs_diff(&hadamard4().matrix), 0.0);
        for (a, b) in prep.achieved.iter().zip(crate::coins::phi2().iter()) {
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn prepare_phi3_hits_target() {
        let prep = prepare_initial_state(&crate::coins::phi3()).unwrap();
        for (a, b) in prep.achieved.iter().zip(crate::coins::phi3().iter()) {
            assert!((a - b).norm() <= 1e-12);
        }
        assert!(prep.residual.is_unitary(TOL_ALGEBRAIC));
    }

    #[test]
    fn prepare_rejects_unnormalized() {
        let v = [C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(
            prepare_initial_state(&v),
            Err(Error::NotNormalized(_))
        ));
    }

    proptest! {
        #[test]
        fn dove_prism_is_involution(theta in -3.2..3.2f64, l in 1i64..4) {
            let d = dove_prism_matrix(theta, l);
            prop_assert!(d.is_unitary(TOL_ALGEBRAIC));
            let id = SquareMatrix::identity(4).unwrap();
            prop_assert!(d.mul(&d).unwrap().max_abs_diff(&id) <= TOL_ALGEBRAIC);
        }

        #[test]
        fn wave_plates_unitary_at_any_angle(angle in -7.0..7.0f64) {
            prop_assert!(half_wave_plate_jones(angle).is_unitary(TOL_ALGEBRAIC));
            prop_assert!(quarter_wave_plate_jones(angle).is_unitary(TOL_ALGEBRAIC));
        }

        #[test]
        fn roundtrip_holds_for_random_inner(a in 0.0..std::f64::consts::TAU, b in 0.0..std::f64::consts::TAU, c in 0.0..std::f64::consts::TAU) {
            let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
            let e = |t: f64| C64::from_polar(1.0, t);
            let inner = SquareMatrix::from_fn(2, |r, col| match (r, col) {
                (0, 0) => e(a) * cb,
                (0, 1) => e(c) * sb,
                (1, 0) => -e(-c) * sb,
                _ => e(-a) * cb,
            }).unwrap();
            prop_assert!(qplate_roundtrip_check(0.5, &inner).unwrap());
        }
    }
}
