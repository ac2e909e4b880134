//! Nets of degree-`d` polynomials over the rationals and their vanishing
//! sequences.
//!
//! A net is a 3-dimensional space of polynomials `b_0 + b_1 x + ... + b_d x^d`,
//! viewed as sections of `O(d)` on the projective line. The order of an
//! element at a finite point `p` is its multiplicity as a root there; at
//! infinity it is `d - deg`. The three distinct orders attained by elements
//! of the net form its vanishing sequence at the point.
//!
//! The degeneration argument for elliptic curves acquiring a rational tail
//! shows that all members of the net share one root sum. That is the linear
//! relation `b_{d-1} + K b_d = 0`, and when the net has no base point at
//! infinity it is equivalent to the vanishing sequence there being
//! `(0, >= 2, *)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::binomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("basis has rank {0}, a net needs 3 independent polynomials")]
    RankDeficient(usize),
    #[error("ambient degree must be at least 1")]
    ZeroDegree,
    #[error("basis element {index} has {got} coefficients, expected {expected}")]
    WrongLength {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("expected exactly 3 basis polynomials, got {0}")]
    WrongBasisSize(usize),
    #[error("malformed rational {text:?} at basis[{row}][{col}]: {reason}")]
    BadRational {
        row: usize,
        col: usize,
        text: String,
        reason: String,
    },
    #[error("malformed series document: {0}")]
    BadDocument(String),
    #[error("root-sum relation holds but the vanishing sequence at infinity is {0}")]
    CriterionContradiction(VanishingSequence),
}

/// Parses `"p/q"` or `"p"` with `q != 0`.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator {num:?}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("bad denominator {den:?}"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(num, den))
}

/// A point of the projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(BigRational),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(p) => write!(f, "{p}"),
            Point::Infinity => f.write_str("infinity"),
        }
    }
}

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "infinity" || s == "inf" {
            Ok(Point::Infinity)
        } else {
            parse_rational(s).map(Point::Finite)
        }
    }
}

/// Distinct vanishing orders `a_0 < a_1 < a_2` of a net at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VanishingSequence(pub [usize; 3]);

impl VanishingSequence {
    pub fn orders(&self) -> [usize; 3] {
        self.0
    }

    /// Some member of the net is nonzero at the point.
    pub fn base_point_free(&self) -> bool {
        self.0[0] == 0
    }

    /// The `(0, >= 2, *)` pattern.
    pub fn is_cuspidal(&self) -> bool {
        self.0[0] == 0 && self.0[1] >= 2
    }
}

impl fmt::Display for VanishingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Solution of `b_{d-1} + K b_d = 0` across a net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSumRelation {
    pub k: BigRational,
    /// Both top coefficients vanish on the whole net, so any `K` works;
    /// `k` is reported as 0.
    pub degenerate: bool,
}

/// Outcome of [`PolySeries::check_lemma1_criterion`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionCheck {
    pub holds: bool,
    pub relation: Option<RootSumRelation>,
    pub at_infinity: VanishingSequence,
}

/// Gaussian elimination over the rationals. Scans columns left to right and
/// returns the pivot columns; row-operation invariant.
fn pivot_columns(mut rows: Vec<Vec<BigRational>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x /= &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * y;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Coefficients of `P(x + p)` given those of `P(x)`.
fn taylor_shift(coeffs: &[BigRational], p: &BigRational) -> Vec<BigRational> {
    let n = coeffs.len();
    let mut powers = Vec::with_capacity(n);
    let mut acc = BigRational::one();
    for _ in 0..n {
        powers.push(acc.clone());
        acc *= p;
    }
    (0..n)
        .map(|m| {
            (m..n)
                .filter(|&i| !coeffs[i].is_zero())
                .map(|i| {
                    let c = BigInt::from(binomial(i as i64, m as i64).into_inner());
                    &coeffs[i] * BigRational::from_integer(c) * &powers[i - m]
                })
                .fold(BigRational::zero(), |a, b| a + b)
        })
        .collect()
}

/// A net of polynomials of ambient degree `d`, stored as three coefficient
/// vectors `b_0 ..= b_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySeries {
    degree: usize,
    basis: [Vec<BigRational>; 3],
}

impl PolySeries {
    pub fn new(degree: usize, basis: [Vec<BigRational>; 3]) -> Result<Self, SeriesError> {
        if degree == 0 {
            return Err(SeriesError::ZeroDegree);
        }
        for (index, row) in basis.iter().enumerate() {
            if row.len() != degree + 1 {
                return Err(SeriesError::WrongLength {
                    index,
                    got: row.len(),
                    expected: degree + 1,
                });
            }
        }
        let rank = pivot_columns(basis.to_vec()).len();
        if rank < 3 {
            return Err(SeriesError::RankDeficient(rank));
        }
        Ok(PolySeries { degree, basis })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_integers(degree: usize, basis: [&[i64]; 3]) -> Result<Self, SeriesError> {
        let conv = |row: &[i64]| {
            row.iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect::<Vec<_>>()
        };
        Self::new(degree, [conv(basis[0]), conv(basis[1]), conv(basis[2])])
    }

    /// The span of the three monomials `x^a` given.
    pub fn monomials(degree: usize, exponents: [usize; 3]) -> Result<Self, SeriesError> {
        let mono = |e: usize| {
            (0..=degree)
                .map(|i| {
                    if i == e {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect::<Vec<_>>()
        };
        Self::new(degree, exponents.map(mono))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> &[Vec<BigRational>; 3] {
        &self.basis
    }

    /// The net after the substitution `x -> x + c`.
    pub fn translate(&self, c: &BigRational) -> PolySeries {
        PolySeries {
            degree: self.degree,
            basis: self.basis.clone().map(|row| taylor_shift(&row, c)),
        }
    }

    /// Replaces the basis by `m * basis`; `m` must be invertible.
    pub fn change_basis(&self, m: [[BigRational; 3]; 3]) -> Result<PolySeries, SeriesError> {
        let combine = |coeffs: &[BigRational; 3]| {
            (0..=self.degree)
                .map(|col| {
                    coeffs
                        .iter()
                        .zip(&self.basis)
                        .map(|(a, row)| a * &row[col])
                        .fold(BigRational::zero(), |x, y| x + y)
                })
                .collect::<Vec<_>>()
        };
        PolySeries::new(
            self.degree,
            [combine(&m[0]), combine(&m[1]), combine(&m[2])],
        )
    }

    /// Vanishing sequence at `point`.
    ///
    /// At a finite point the basis is re-expanded in powers of `x - p`; at
    /// infinity the coefficient vectors are reversed, so in both cases the
    /// order of an element is the index of its lowest nonzero coefficient and
    /// the distinct orders are the pivot columns of the reduced basis.
    pub fn vanishing_sequence(&self, point: &Point) -> VanishingSequence {
        let rows: Vec<Vec<BigRational>> = match point {
            Point::Infinity => self
                .basis
                .iter()
                .map(|row| row.iter().rev().cloned().collect())
                .collect(),
            Point::Finite(p) => self.basis.iter().map(|row| taylor_shift(row, p)).collect(),
        };
        let pivots = pivot_columns(rows);
        VanishingSequence([pivots[0], pivots[1], pivots[2]])
    }

    /// Finds `K` with `b_{d-1} + K b_d = 0` on every member of the net.
    pub fn root_sum_relation(&self) -> Option<RootSumRelation> {
        let d = self.degree;
        let top: Vec<&BigRational> = self.basis.iter().map(|r| &r[d]).collect();
        let sub: Vec<&BigRational> = self.basis.iter().map(|r| &r[d - 1]).collect();
        let Some(i) = top.iter().position(|t| !t.is_zero()) else {
            return sub.iter().all(|s| s.is_zero()).then(|| RootSumRelation {
                k: BigRational::zero(),
                degenerate: true,
            });
        };
        let k = -(sub[i] / top[i]);
        top.iter()
            .zip(&sub)
            .all(|(t, s)| (*s + &k * *t).is_zero())
            .then_some(RootSumRelation {
                k,
                degenerate: false,
            })
    }

    /// Checks the root-sum relation and, when it holds on a net without a
    /// base point at infinity, confirms the `(0, >= 2, *)` vanishing pattern
    /// there.
    pub fn check_lemma1_criterion(&self) -> Result<CriterionCheck, SeriesError> {
        let relation = self.root_sum_relation();
        let at_infinity = self.vanishing_sequence(&Point::Infinity);
        if relation.is_some() && at_infinity.base_point_free() && !at_infinity.is_cuspidal() {
            return Err(SeriesError::CriterionContradiction(at_infinity));
        }
        Ok(CriterionCheck {
            holds: relation.is_some(),
            relation,
            at_infinity,
        })
    }

    pub fn to_document(&self) -> SeriesDocument {
        SeriesDocument {
            degree: self.degree,
            basis: self
                .basis
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    pub fn from_document(doc: &SeriesDocument) -> Result<Self, SeriesError> {
        if doc.basis.len() != 3 {
            return Err(SeriesError::WrongBasisSize(doc.basis.len()));
        }
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(3);
        for (row, entries) in doc.basis.iter().enumerate() {
            let parsed = entries
                .iter()
                .enumerate()
                .map(|(col, text)| {
                    parse_rational(text).map_err(|reason| SeriesError::BadRational {
                        row,
                        col,
                        text: text.clone(),
                        reason,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(parsed);
        }
        let [a, b, c]: [Vec<BigRational>; 3] = rows.try_into().expect("three rows");
        PolySeries::new(doc.degree, [a, b, c])
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        let doc: SeriesDocument =
            serde_json::from_str(text).map_err(|e| SeriesError::BadDocument(e.to_string()))?;
        Self::from_document(&doc)
    }

    /// Canonical JSON: reduced rationals, integers without a denominator.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("serializable")
    }
}

/// Exchange format: `{"degree": d, "basis": [[...], [...], [...]]}` with each
/// entry a `"p/q"` (or `"p"`) string and `d + 1` entries per row, ordered by
/// increasing power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    pub degree: usize,
    pub basis: Vec<Vec<String>>,
}

/// Sum of the roots of a polynomial of exact degree `d`, `-b_{d-1}/b_d`.
pub fn root_sum(coeffs: &[BigRational]) -> Option<BigRational> {
    let d = coeffs.len().checked_sub(1)?;
    if d == 0 || coeffs[d].is_zero() {
        return None;
    }
    Some(-(&coeffs[d - 1] / &coeffs[d]))
}
