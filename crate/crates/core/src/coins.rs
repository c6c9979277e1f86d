//! Named coin operators, the Sagnac swap correction and gate-circuit
//! decompositions of the modified coins.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{tensor2x2, C64, CoinVec, SquareMatrix, TOL_ALGEBRAIC};

/// A named 4x4 unitary acting on the coin space.
#[derive(Debug, Clone)]
pub struct CoinOperator {
    pub name: String,
    pub matrix: SquareMatrix,
}

impl CoinOperator {
    /// Wraps a 4x4 matrix, enforcing unitarity at the algebraic tolerance.
    pub fn new(name: impl Into<String>, matrix: SquareMatrix) -> Result<Self> {
        let name = name.into();
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.dim(),
            });
        }
        if !matrix.is_unitary(TOL_ALGEBRAIC) {
            return Err(Error::NonUnitary(name));
        }
        Ok(Self { name, matrix })
    }
}

/// One layer of a gate circuit on the (polarization, OAM) qubit pair.
#[derive(Debug, Clone)]
pub enum GateLayer {
    /// Single-qubit gate on the polarization qubit.
    Pol(SquareMatrix),
    /// Single-qubit gate on the OAM qubit.
    Oam(SquareMatrix),
    /// CNOT with polarization control and OAM target. This is the only CNOT
    /// orientation the bench provides.
    Cnot,
}

/// Ordered gate layers, listed in circuit-diagram order.
///
/// The compiled matrix is the left-to-right operator product of the layers,
/// so the *last* listed layer acts first on a state. This is the reading
/// under which the printed decompositions reproduce `U_SI^-1 * C`.
#[derive(Debug, Clone)]
pub struct GateCircuit {
    pub layers: Vec<GateLayer>,
}

/// 2x2 Hadamard.
pub fn h2() -> SquareMatrix {
    SquareMatrix::from_real_rows(&[
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ])
    .expect("static matrix")
}

/// CNOT with polarization control and OAM target, in the coin basis.
pub fn cnot4() -> SquareMatrix {
    SquareMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("static matrix")
}

/// The four-dimensional Hadamard coin, H4 = H2 (x) H2. All entries are +-1/2.
pub fn hadamard4() -> CoinOperator {
    let m = SquareMatrix::from_real_rows(&[
        &[0.5, 0.5, 0.5, 0.5],
        &[0.5, -0.5, 0.5, -0.5],
        &[0.5, 0.5, -0.5, -0.5],
        &[0.5, -0.5, -0.5, 0.5],
    ])
    .expect("static matrix");
    CoinOperator::new("hadamard4", m).expect("H4 is unitary")
}

/// The Grover coin: -1/2 on the diagonal, +1/2 off the diagonal.
pub fn grover4() -> CoinOperator {
    let m = SquareMatrix::from_fn(4, |r, c| {
        C64::new(if r == c { -0.5 } else { 0.5 }, 0.0)
    })
    .expect("static matrix");
    CoinOperator::new("grover4", m).expect("U_G is unitary")
}

/// The Sagnac-interferometer swap U_SI: exchanges |H,-> and |V,->, identity
/// on |H,+> and |V,+>. Its own inverse.
pub fn sagnac_swap() -> CoinOperator {
    let m = SquareMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
    ])
    .expect("static matrix");
    CoinOperator::new("sagnac_swap", m).expect("permutation is unitary")
}

/// The coin that must be built on the bench so the walk behaves as `c`:
/// `U_SI^-1 * c` (and U_SI is its own inverse). The name gains or loses a
/// trailing prime so applying this twice round-trips.
pub fn modified_coin(c: &CoinOperator) -> CoinOperator {
    let m = sagnac_swap().matrix.mul(&c.matrix).expect("4x4 product");
    let name = match c.name.strip_suffix('\'') {
        Some(base) => base.to_string(),
        None => format!("{}'", c.name),
    };
    CoinOperator::new(name, m).expect("product of unitaries")
}

/// Compiles a circuit to its coin-space unitary.
///
/// Layers are multiplied left-to-right in listed (diagram) order, so the
/// last listed layer is the first to act on a state. Single-qubit layers
/// are tensored with the identity on the other qubit; every gate must be
/// unitary.
pub fn compile_circuit(g: &GateCircuit) -> Result<CoinOperator> {
    if g.layers.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let i2 = SquareMatrix::identity(2)?;
    let mut acc = SquareMatrix::identity(4)?;
    for layer in &g.layers {
        let m = match layer {
            GateLayer::Pol(u) => {
                if !u.is_unitary(TOL_ALGEBRAIC) {
                    return Err(Error::NonUnitary("pol gate".into()));
                }
                tensor2x2(u, &i2)?
            }
            GateLayer::Oam(u) => {
                if !u.is_unitary(TOL_ALGEBRAIC) {
                    return Err(Error::NonUnitary("oam gate".into()));
                }
                tensor2x2(&i2, u)?
            }
            GateLayer::Cnot => cnot4(),
        };
        acc = acc.mul(&m)?;
    }
    CoinOperator::new("compiled", acc)
}

/// The Hadamard coin circuit: a half-wave plate (H2 on polarization) and a
/// pi-mode converter (H2 on OAM); with `corrected` a trailing CNOT absorbs
/// the Sagnac swap, giving H4' = U_SI^-1 H4.
pub fn hadamard_circuit(corrected: bool) -> GateCircuit {
    let mut layers = vec![GateLayer::Pol(h2()), GateLayer::Oam(h2())];
    if corrected {
        layers.push(GateLayer::Cnot);
    }
    GateCircuit { layers }
}

fn phase(t: f64) -> C64 {
    Complex64::from_polar(1.0, t)
}

/// The printed decomposition of the modified Grover coin: four single-qubit
/// gates around one CNOT.
///
/// The U2 gate is printed with prefactor e^{-i pi/4}/2, which is not unitary
/// (its columns have norm 1/sqrt(2)); with the 1/sqrt(2) prefactor carried by
/// the sibling gates the circuit reproduces U_SI^-1 U_G up to global phase.
/// We use the unitary prefactor here; the matrix product U_SI^-1 U_G remains
/// the authoritative definition of the modified Grover coin.
pub fn grover_circuit() -> GateCircuit {
    let p = phase(-PI / 4.0) * FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let u1 = SquareMatrix::from_fn(2, |r, c| {
        p * match (r, c) {
            (0, 0) | (0, 1) | (1, 1) => one,
            _ => -one,
        }
    })
    .expect("static matrix");
    let u2 = SquareMatrix::from_fn(2, |r, c| {
        p * match (r, c) {
            (0, 0) => one,
            (0, 1) => -one,
            _ => -i,
        }
    })
    .expect("static matrix");
    let v1 = SquareMatrix::from_fn(2, |r, c| {
        p * match (r, c) {
            (0, 0) => i,
            (1, 0) => -i,
            _ => one,
        }
    })
    .expect("static matrix");
    let v2 = SquareMatrix::from_fn(2, |r, c| {
        p * match (r, c) {
            (0, 0) | (0, 1) => -i,
            (1, 0) => one,
            _ => -one,
        }
    })
    .expect("static matrix");
    GateCircuit {
        layers: vec![
            GateLayer::Pol(u1),
            GateLayer::Oam(v1),
            GateLayer::Cnot,
            GateLayer::Pol(u2),
            GateLayer::Oam(v2),
        ],
    }
}

/// The initial coin state phi_1 = 1/2 (|H+> + |H-> - |V+> - |V->).
pub fn phi1() -> CoinVec {
    [
        C64::new(0.5, 0.0),
        C64::new(0.5, 0.0),
        C64::new(-0.5, 0.0),
        C64::new(-0.5, 0.0),
    ]
}

/// The initial coin state phi_2 = 1/2 (|H+> + |H-> + |V+> + |V->).
pub fn phi2() -> CoinVec {
    [C64::new(0.5, 0.0); 4]
}

/// The initial coin state phi_3 = 1/2 (|H+> + |H-> + i|V+> + i|V->).
pub fn phi3() -> CoinVec {
    [
        C64::new(0.5, 0.0),
        C64::new(0.5, 0.0),
        C64::new(0.0, 0.5),
        C64::new(0.0, 0.5),
    ]
}

/// Coin basis state by index under the fixed convention.
pub fn basis_state(idx: usize) -> CoinVec {
    assert!(idx < 4);
    let mut v = [C64::new(0.0, 0.0); 4];
    v[idx] = C64::new(1.0, 0.0);
    v
}

/// Resolves a coin identifier from the CLI registry: "hadamard4", "grover4",
/// "sagnac_swap", or "file:<path>" pointing at a JSON 4x4 array of [re, im]
/// pairs in row-major order.
pub fn coin_by_name(name: &str) -> Result<CoinOperator> {
    match name {
        "hadamard4" => Ok(hadamard4()),
        "grover4" => Ok(grover4()),
        "sagnac_swap" => Ok(sagnac_swap()),
        _ => {
            if let Some(path) = name.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)?;
                coin_from_json(&text)
            } else {
                Err(Error::UnknownCoin(name.to_string()))
            }
        }
    }
}

/// Parses a user-supplied 4x4 complex matrix: a JSON array of 4 rows of 4
/// [re, im] pairs.
pub fn coin_from_json(text: &str) -> Result<CoinOperator> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("coin matrix: {e}")))?;
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(Error::Config("coin matrix must be 4x4".into()));
    }
    let m = SquareMatrix::from_fn(4, |r, c| C64::new(rows[r][c][0], rows[r][c][1]))?;
    CoinOperator::new("file", m)
}
