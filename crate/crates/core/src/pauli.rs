//! Pauli-string algebra and weighted Pauli-sum Hamiltonians.
//!
//! Strings are stored as a pair of bitmasks (x-mask, z-mask) so that products
//! and phases reduce to O(N) bit operations: per qubit, the letter is
//! I = (0,0), X = (1,0), Y = (1,1), Z = (0,1). Operators are applied to
//! statevectors matrix-free, one amplitude pass per term.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Coefficients with magnitude below this are dropped during canonicalization.
pub const COEFF_EPS: f64 = 1e-14;

/// Maximum qubit count representable by the u64 mask pair.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A length-N word over {I, X, Y, Z}; qubit 0 is the leftmost letter in the
/// textual form and the least significant bit of the masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x_mask: u64,
    z_mask: u64,
    num_qubits: usize,
}

impl PauliString {
    /// The all-identity word on `num_qubits` qubits (weight 0).
    pub fn identity(num_qubits: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString {
            x_mask: 0,
            z_mask: 0,
            num_qubits,
        }
    }

    /// Build from raw masks. Bits above `num_qubits` must be clear.
    pub fn from_masks(x_mask: u64, z_mask: u64, num_qubits: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let valid = if num_qubits == 64 {
            u64::MAX
        } else {
            (1u64 << num_qubits) - 1
        };
        assert!(
            x_mask & !valid == 0 && z_mask & !valid == 0,
            "mask bits outside qubit range"
        );
        PauliString {
            x_mask,
            z_mask,
            num_qubits,
        }
    }

    /// A single non-identity letter at `qubit`, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, letter: Pauli) -> Self {
        assert!(qubit < num_qubits);
        let bit = 1u64 << qubit;
        let (x, z) = match letter {
            Pauli::I => (0, 0),
            Pauli::X => (bit, 0),
            Pauli::Y => (bit, bit),
            Pauli::Z => (0, bit),
        };
        Self::from_masks(x, z, num_qubits)
    }

    /// Parse a word like "ZZI" (qubit 0 leftmost).
    pub fn parse(word: &str) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut n = 0usize;
        for (i, c) in word.chars().enumerate() {
            if i >= MAX_QUBITS {
                return Err(Error::Parse {
                    line: 0,
                    reason: format!("word longer than {MAX_QUBITS} letters"),
                });
            }
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << i,
                'Y' => {
                    x |= 1 << i;
                    z |= 1 << i;
                }
                'Z' => z |= 1 << i,
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        reason: format!("invalid Pauli letter '{other}'"),
                    })
                }
            }
            n = i + 1;
        }
        Ok(PauliString {
            x_mask: x,
            z_mask: z,
            num_qubits: n,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// Letter at `qubit`.
    pub fn letter(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.num_qubits);
        Pauli::from_bits(
            self.x_mask >> qubit & 1 == 1,
            self.z_mask >> qubit & 1 == 1,
        )
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Support as a qubit mask.
    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    /// Operator product p·q = phase·r with phase one of {1, -1, i, -i}.
    pub fn multiply(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
                context: "pauli product",
            });
        }
        // i-exponent per qubit from the single-qubit algebra:
        // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
        let mut exponent = 0u32; // phase = i^exponent mod 4
        let mut sup = self.support() | other.support();
        while sup != 0 {
            let q = sup.trailing_zeros() as usize;
            sup &= sup - 1;
            let a = self.letter(q);
            let b = other.letter(q);
            exponent += match (a, b) {
                (Pauli::X, Pauli::Y) | (Pauli::Y, Pauli::Z) | (Pauli::Z, Pauli::X) => 1,
                (Pauli::Y, Pauli::X) | (Pauli::Z, Pauli::Y) | (Pauli::X, Pauli::Z) => 3,
                _ => 0,
            };
        }
        let phase = match exponent % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Ok((
            phase,
            PauliString {
                x_mask: self.x_mask ^ other.x_mask,
                z_mask: self.z_mask ^ other.z_mask,
                num_qubits: self.num_qubits,
            },
        ))
    }

    /// Sign and i-factor picked up by this string acting on basis state `b`:
    /// P|b> = amp_factor(b) |b ^ x_mask>.
    #[inline]
    fn basis_phase(&self, b: u64) -> Complex64 {
        let sign = if ((b & self.z_mask).count_ones() & 1) == 1 {
            -1.0
        } else {
            1.0
        };
        let y_count = (self.x_mask & self.z_mask).count_ones() % 4;
        let i_pow = match y_count {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        i_pow * sign
    }

    /// Apply p|s> matrix-free: O(2^N) time, one output vector.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if self.num_qubits != s.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: s.num_qubits(),
                context: "pauli application",
            });
        }
        let amps = s.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        self.apply_into(amps, &mut out);
        Ok(StateVector::from_raw(out, self.num_qubits))
    }

    /// out[j] = phase(j ^ x) * in[j ^ x]; `out` is overwritten.
    pub(crate) fn apply_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        let x = self.x_mask;
        let y_count = (self.x_mask & self.z_mask).count_ones() % 4;
        let i_pow = match y_count {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        for (j, o) in out.iter_mut().enumerate() {
            let src = j as u64 ^ x;
            let sign = 1.0 - 2.0 * (((src & self.z_mask).count_ones() & 1) as f64);
            *o = i_pow * sign * amps[src as usize];
        }
    }

    /// <s|P|s> in a single amplitude pass, without materializing P|s>.
    pub fn expectation(&self, s: &StateVector) -> Result<Complex64> {
        if self.num_qubits != s.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: s.num_qubits(),
                context: "pauli expectation",
            });
        }
        let amps = s.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in amps.iter().enumerate() {
            let b = b as u64;
            let dst = (b ^ self.x_mask) as usize;
            acc += amps[dst].conj() * self.basis_phase(b) * amp;
        }
        Ok(acc)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

/// A Pauli string with a complex coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: Complex64, string: PauliString) -> Result<Self> {
        if !coefficient.re.is_finite() || !coefficient.im.is_finite() {
            return Err(Error::NonFiniteCoefficient {
                value: format!("{coefficient}"),
            });
        }
        Ok(PauliTerm {
            coefficient,
            string,
        })
    }

    pub fn real(coefficient: f64, string: PauliString) -> Result<Self> {
        Self::new(Complex64::new(coefficient, 0.0), string)
    }
}

/// Weighted sum of Pauli strings. Construction canonicalizes: duplicate
/// strings are merged and terms with |coefficient| < 1e-14 dropped, so no two
/// terms share a string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    terms: Vec<PauliTerm>,
    num_qubits: usize,
}

impl PauliSum {
    /// Canonicalize a term list into a sum.
    pub fn new(num_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.string.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: num_qubits,
                    got: t.string.num_qubits(),
                    context: "pauli sum term",
                });
            }
            if !t.coefficient.re.is_finite() || !t.coefficient.im.is_finite() {
                return Err(Error::NonFiniteCoefficient {
                    value: format!("{}", t.coefficient),
                });
            }
        }
        let mut terms = terms;
        terms.sort_by_key(|t| (t.string.x_mask(), t.string.z_mask()));
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.string == t.string => last.coefficient += t.coefficient,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient.norm() >= COEFF_EPS);
        Ok(PauliSum {
            terms: merged,
            num_qubits,
        })
    }

    pub fn zero(num_qubits: usize) -> Self {
        PauliSum {
            terms: Vec::new(),
            num_qubits,
        }
    }

    /// Construct from real coefficients, asserting Hermiticity.
    pub fn hermitian(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, s)| PauliTerm::real(c, s))
            .collect::<Result<Vec<_>>>()?;
        let sum = Self::new(num_qubits, terms)?;
        sum.require_hermitian()?;
        Ok(sum)
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient.im.abs() < COEFF_EPS)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        for t in &self.terms {
            if t.coefficient.im.abs() >= COEFF_EPS {
                return Err(Error::NonHermitian {
                    term: t.string.to_string(),
                    imag: t.coefficient.im,
                });
            }
        }
        Ok(())
    }

    /// True when every term is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.string.x_mask() == 0)
    }

    /// Coefficient of `string`, zero when absent.
    pub fn coefficient_of(&self, string: &PauliString) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.string == *string)
            .map(|t| t.coefficient)
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Sum with another operator.
    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
                context: "pauli sum addition",
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        PauliSum::new(self.num_qubits, terms)
    }

    /// Multiply every coefficient by a real scalar.
    pub fn scale(&self, factor: f64) -> PauliSum {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: t.coefficient * factor,
                string: t.string,
            })
            .collect();
        PauliSum::new(self.num_qubits, terms).expect("scaling preserves validity")
    }

    /// Left-multiply by a single Pauli string, expanding p·H into a
    /// complex-weighted sum via the string product algebra.
    pub fn left_multiply(&self, p: &PauliString) -> Result<PauliSum> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let (phase, r) = p.multiply(&t.string)?;
            terms.push(PauliTerm {
                coefficient: phase * t.coefficient,
                string: r,
            });
        }
        PauliSum::new(self.num_qubits, terms)
    }

    /// Apply H|s> matrix-free by accumulating term contributions.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if self.num_qubits != s.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: s.num_qubits(),
                context: "pauli sum application",
            });
        }
        let amps = s.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for t in &self.terms {
            let x = t.string.x_mask();
            let z = t.string.z_mask();
            let y_count = (x & z).count_ones() % 4;
            let i_pow = match y_count {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            let c = t.coefficient * i_pow;
            for (j, o) in out.iter_mut().enumerate() {
                let src = j as u64 ^ x;
                let sign = 1.0 - 2.0 * (((src & z).count_ones() & 1) as f64);
                *o += c * sign * amps[src as usize];
            }
        }
        Ok(StateVector::from_raw(out, self.num_qubits))
    }

    /// <s|H|s> = sum_a h_a <s|P_a|s>, matrix-free. Real within rounding when
    /// the sum is Hermitian; the state must be normalized.
    pub fn expectation(&self, s: &StateVector) -> Result<Complex64> {
        if self.num_qubits != s.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: s.num_qubits(),
                context: "pauli sum expectation",
            });
        }
        s.require_normalized()?;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coefficient * t.string.expectation(s)?;
        }
        Ok(acc)
    }

    /// Serialize as one term per line: `<re> <im> <word>`, coefficients with
    /// 17 significant digits so the round trip is lossless.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!(
                "{:.16e} {:.16e} {}\n",
                t.coefficient.re, t.coefficient.im, t.string
            ));
        }
        out
    }

    /// Parse the textual format. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut num_qubits: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (re, im, word) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(re), Some(im), Some(word), None) => (re, im, word),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        reason: "expected `<re> <im> <word>`".into(),
                    })
                }
            };
            let re: f64 = re.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                reason: format!("bad real part: {e}"),
            })?;
            let im: f64 = im.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                reason: format!("bad imaginary part: {e}"),
            })?;
            let string = PauliString::parse(word).map_err(|e| Error::Parse {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            match num_qubits {
                None => num_qubits = Some(string.num_qubits()),
                Some(n) if n != string.num_qubits() => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        reason: format!(
                            "word length {} differs from earlier lines ({n})",
                            string.num_qubits()
                        ),
                    })
                }
                _ => {}
            }
            terms.push(PauliTerm::new(Complex64::new(re, im), string)?);
        }
        let n = num_qubits.ok_or(Error::Parse {
            line: 0,
            reason: "no terms found".into(),
        })?;
        PauliSum::new(n, terms)
    }
}

/// Free-function form of the string product.
pub fn pauli_multiply(p: &PauliString, q: &PauliString) -> Result<(Complex64, PauliString)> {
    p.multiply(q)
}
