//! Exact enumerative invariants of the projective plane.
//!
//! `N_d` counts irreducible nodal rational plane curves of degree `d` through
//! `3d - 1` general points. It obeys the quadratic recursion
//!
//! ```text
//! N_1 = 1
//! N_d = sum_{i+j=d} N_i N_j ( i^2 j^2 C(3d-4, 3i-2) - i^3 j C(3d-4, 3i-1) )
//! ```
//!
//! The number of elliptic curves with fixed generic `j`-invariant is
//! `C(d-1, 2) N_d`; for `j = 0` and `j = 1728` it is divided by the order of
//! the extra automorphism group (3 and 2). All arithmetic is arbitrary
//! precision and exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, ParseBigIntError};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvariantsError {
    #[error("degree must be at least {min}, got {got}")]
    DegreeTooSmall { got: i64, min: i64 },
    #[error("elliptic counts are defined only for d >= 3, got d = {0}")]
    OutsideEllipticDomain(i64),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// A non-negative arbitrary-precision count.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Count(BigUint);

impl Count {
    pub fn new(value: BigUint) -> Self {
        Count(value)
    }

    pub fn zero() -> Self {
        Count(BigUint::zero())
    }

    pub fn one() -> Self {
        Count(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Residue modulo a small modulus.
    pub fn rem_small(&self, modulus: u32) -> u32 {
        (&self.0 % modulus).to_u32().expect("residue below modulus")
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Count {
    type Err = ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BigUint::from_str(s).map(Count)
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<BigUint> for Count {
    fn from(v: BigUint) -> Self {
        Count(v)
    }
}

// Counts travel as decimal strings so consumers limited to doubles stay exact.
impl Serialize for Count {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

/// The finite `j`-invariant classes with distinct automorphism behaviour.
///
/// `j = infinity` is intentionally absent: fixed-`j` elliptic counts are only
/// defined for finite `j`, and the `j = infinity` fibre is reachable through
/// [`zt_invariant`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JClass {
    Generic,
    JZero,
    J1728,
}

impl JClass {
    pub const ALL: [JClass; 3] = [JClass::Generic, JClass::JZero, JClass::J1728];

    /// Multiplicity of the fibre over this `j`, the order of the extra
    /// automorphisms of the curve.
    pub fn aut_factor(self) -> u32 {
        match self {
            JClass::Generic => 1,
            JClass::JZero => 3,
            JClass::J1728 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            JClass::Generic => "generic",
            JClass::JZero => "0",
            JClass::J1728 => "1728",
        }
    }
}

impl fmt::Display for JClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for JClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(JClass::Generic),
            "0" => Ok(JClass::JZero),
            "1728" => Ok(JClass::J1728),
            other => Err(format!(
                "unknown j-class {other:?} (expected generic, 0 or 1728)"
            )),
        }
    }
}

/// `C(n, k)`, with the convention that out-of-range arguments give 0.
pub fn binomial(n: i64, k: i64) -> Count {
    if n < 0 || k < 0 || k > n {
        return Count::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    Count(acc)
}

/// Row `n` of Pascal's triangle, `C(n, 0) ..= C(n, n)`.
fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut cur = BigUint::one();
    row.push(cur.clone());
    for m in 0..n {
        cur = cur * (n - m) / (m + 1);
        row.push(cur.clone());
    }
    row
}

/// Dense memo of `N_1 ..= N_m`.
///
/// Filling needs `&mut self`; a filled table is `Sync` and can be shared for
/// concurrent lookups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionTable {
    values: Vec<Count>,
}

impl Default for RecursionTable {
    fn default() -> Self {
        Self::new()
    }
}

impl RecursionTable {
    pub fn new() -> Self {
        RecursionTable {
            values: vec![Count::one()],
        }
    }

    /// Builds a table from stored values `N_1, N_2, ...` without
    /// re-deriving them. Callers are responsible for validation; see
    /// [`RecursionTable::derive_entry`].
    pub fn from_values(values: Vec<Count>) -> Result<Self, InvariantsError> {
        match values.first() {
            Some(first) if *first == Count::one() => Ok(RecursionTable { values }),
            Some(first) => Err(InvariantsError::Inconsistent(format!(
                "N_1 must be 1, found {first}"
            ))),
            None => Err(InvariantsError::Inconsistent(
                "empty recursion table".into(),
            )),
        }
    }

    /// Highest degree currently stored.
    pub fn max_degree(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, d: u32) -> Option<&Count> {
        if d == 0 {
            return None;
        }
        self.values.get(d as usize - 1)
    }

    pub fn values(&self) -> &[Count] {
        &self.values
    }

    /// Evaluates the recursion for `N_d` from the entries below `d`, which
    /// must already be present. Used both for filling and for auditing
    /// stored entries.
    pub fn derive_entry(&self, d: u32) -> Result<Count, InvariantsError> {
        if d == 0 {
            return Err(InvariantsError::DegreeTooSmall { got: 0, min: 1 });
        }
        if d == 1 {
            return Ok(Count::one());
        }
        if (self.values.len() as u32) < d - 1 {
            return Err(InvariantsError::Inconsistent(format!(
                "N_{d} requested with only {} lower entries",
                self.values.len()
            )));
        }
        let d64 = u64::from(d);
        let row = binomial_row(3 * d64 - 4);
        let pick = |m: u64| row.get(m as usize).cloned().unwrap_or_default();

        // Positive and negative parts are summed separately so every
        // intermediate stays unsigned.
        let mut positive = BigUint::zero();
        let mut negative = BigUint::zero();
        for i in 1..d64 {
            let j = d64 - i;
            let product = &self.values[i as usize - 1].0 * &self.values[j as usize - 1].0;
            positive += &product * (i * i * j * j) * pick(3 * i - 2);
            negative += &product * (i * i * i * j) * pick(3 * i - 1);
        }
        if negative > positive {
            return Err(InvariantsError::Inconsistent(format!(
                "recursion produced a negative value at d = {d}"
            )));
        }
        Ok(Count(positive - negative))
    }

    /// Extends the table so that it holds `N_1 ..= N_d`.
    pub fn fill_to(&mut self, d: u32) -> Result<(), InvariantsError> {
        while (self.values.len() as u32) < d {
            let next = self.values.len() as u32 + 1;
            let value = self.derive_entry(next)?;
            self.values.push(value);
        }
        Ok(())
    }
}

/// `N_d`, filling `table` up to `d` as needed.
pub fn rational_count(d: i64, table: &mut RecursionTable) -> Result<Count, InvariantsError> {
    if d < 1 {
        return Err(InvariantsError::DegreeTooSmall { got: d, min: 1 });
    }
    let d = u32::try_from(d)
        .map_err(|_| InvariantsError::Inconsistent(format!("degree {d} out of range")))?;
    table.fill_to(d)?;
    Ok(table.get(d).cloned().expect("table filled to d"))
}

fn check_elliptic_domain(d: i64) -> Result<(), InvariantsError> {
    if d < 3 {
        Err(InvariantsError::OutsideEllipticDomain(d))
    } else {
        Ok(())
    }
}

/// The top intersection `Z . T = C(d-1, 2) N_d`, which also counts maps from
/// the nodal rational curve (`j = infinity`) through the points.
pub fn zt_invariant(d: i64, table: &mut RecursionTable) -> Result<Count, InvariantsError> {
    check_elliptic_domain(d)?;
    let nd = rational_count(d, table)?;
    Ok(Count(binomial(d - 1, 2).0 * nd.0))
}

/// `E_{d,j}`, the number of degree-`d` elliptic plane curves with the given
/// `j`-invariant through `3d - 1` general points.
pub fn elliptic_count(
    d: i64,
    j: JClass,
    table: &mut RecursionTable,
) -> Result<Count, InvariantsError> {
    let zt = zt_invariant(d, table)?;
    let factor = BigUint::from(j.aut_factor());
    let (quotient, remainder) = zt.0.div_rem(&factor);
    if !remainder.is_zero() || &quotient * &factor != zt.0 {
        return Err(InvariantsError::Inconsistent(format!(
            "Z.T = {zt} at d = {d} is not divisible by {factor} (j = {j})"
        )));
    }
    Ok(Count(quotient))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityRow {
    pub d: u32,
    pub nd_mod3: u32,
    pub d_mod3: u32,
    pub binom_mod3: u32,
    /// Set when `3 | N_d` and `3 | d` disagree.
    pub flagged: bool,
}

/// Residues mod 3 of `N_d`, `d` and `C(d-1, 2)` for `3 <= d <= d_max`.
pub fn divisibility_report(d_max: i64) -> Result<Vec<DivisibilityRow>, InvariantsError> {
    check_elliptic_domain(d_max)?;
    let mut table = RecursionTable::new();
    rational_count(d_max, &mut table)?;
    let rows = (3..=d_max as u32)
        .map(|d| {
            let nd_mod3 = table.get(d).expect("filled").rem_small(3);
            let d_mod3 = d % 3;
            DivisibilityRow {
                d,
                nd_mod3,
                d_mod3,
                binom_mod3: binomial(i64::from(d) - 1, 2).rem_small(3),
                flagged: (nd_mod3 == 0) != (d_mod3 == 0),
            }
        })
        .collect();
    Ok(rows)
}

/// Signed helper for callers that need `N_d` as a `BigInt`.
pub fn to_signed(c: &Count) -> BigInt {
    BigInt::from(c.0.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Straight-line evaluation with no shared table and its own Pascal
    /// triangle, kept independent of `RecursionTable`.
    fn oracle_nd(d: usize) -> BigInt {
        let n = 3 * d;
        let mut pascal = vec![vec![BigInt::zero(); n + 1]; n + 1];
        for a in 0..=n {
            pascal[a][0] = BigInt::one();
            for b in 1..=a {
                pascal[a][b] = &pascal[a - 1][b - 1] + &pascal[a - 1][b];
            }
        }
        let c = |a: i64, b: i64| -> BigInt {
            if a < 0 || b < 0 || b > a {
                BigInt::zero()
            } else {
                pascal[a as usize][b as usize].clone()
            }
        };
        let mut vals = vec![BigInt::zero(), BigInt::one()];
        for e in 2..=d as i64 {
            let mut acc = BigInt::zero();
            for i in 1..e {
                let j = e - i;
                let nn = &vals[i as usize] * &vals[j as usize];
                acc += &nn * (i * i * j * j) * c(3 * e - 4, 3 * i - 2);
                acc -= &nn * (i * i * i * j) * c(3 * e - 4, 3 * i - 1);
            }
            vals.push(acc);
        }
        vals[d].clone()
    }

    fn nd(d: i64) -> Count {
        rational_count(d, &mut RecursionTable::new()).unwrap()
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), Count::from(10));
        assert_eq!(binomial(5, 5), Count::from(1));
        assert_eq!(binomial(8, 4), Count::from(70));
        assert_eq!(binomial(4, 7), Count::zero());
        assert_eq!(binomial(4, -1), Count::zero());
        assert_eq!(binomial(-3, 1), Count::zero());
        assert_eq!(binomial(0, 0), Count::one());
    }

    #[test]
    fn small_rational_counts() {
        // d=2: 1*1*(1*C(2,1) - 1*C(2,2)); d=3: 0 + 12; d=4: -144 + 224 + 540.
        assert_eq!(nd(1), Count::from(1));
        assert_eq!(nd(2), Count::from(1));
        assert_eq!(nd(3), Count::from(12));
        assert_eq!(nd(4), Count::from(620));
        for d in 1..=6 {
            assert_eq!(to_signed(&nd(d)), oracle_nd(d as usize), "d = {d}");
        }
    }

    #[test]
    fn memoized_matches_fresh_tables() {
        let mut shared = RecursionTable::new();
        for d in 1..=15 {
            let memo = rational_count(d, &mut shared).unwrap();
            assert_eq!(memo, nd(d));
            assert_eq!(to_signed(&memo), oracle_nd(d as usize));
        }
    }

    #[test]
    fn n10_exceeds_u64() {
        assert!(nd(10).value().bits() > 64);
    }

    #[test]
    fn rejects_bad_degrees() {
        let mut t = RecursionTable::new();
        assert_eq!(
            rational_count(0, &mut t),
            Err(InvariantsError::DegreeTooSmall { got: 0, min: 1 })
        );
        assert!(rational_count(-4, &mut t).is_err());
        assert_eq!(
            elliptic_count(2, JClass::JZero, &mut t),
            Err(InvariantsError::OutsideEllipticDomain(2))
        );
        assert!(zt_invariant(1, &mut t).is_err());
    }

    #[test]
    fn elliptic_examples() {
        let mut t = RecursionTable::new();
        assert_eq!(
            elliptic_count(3, JClass::Generic, &mut t).unwrap(),
            Count::from(12)
        );
        assert_eq!(
            elliptic_count(3, JClass::JZero, &mut t).unwrap(),
            Count::from(4)
        );
        assert_eq!(
            elliptic_count(3, JClass::J1728, &mut t).unwrap(),
            Count::from(6)
        );
        assert_eq!(
            elliptic_count(4, JClass::Generic, &mut t).unwrap(),
            Count::from(1860)
        );
        assert_eq!(zt_invariant(3, &mut t).unwrap(), Count::from(12));
        assert_eq!(zt_invariant(4, &mut t).unwrap(), Count::from(1860));
        // 6 * N_5, N_5 cross-checked against the straight-line oracle.
        assert_eq!(oracle_nd(5), BigInt::from(87304));
        assert_eq!(zt_invariant(5, &mut t).unwrap(), Count::from(523824));
    }

    #[test]
    fn zt_factors_through_every_j_class() {
        let mut t = RecursionTable::new();
        for d in 3..=30 {
            let zt = zt_invariant(d, &mut t).unwrap();
            for j in JClass::ALL {
                let e = elliptic_count(d, j, &mut t).unwrap();
                assert_eq!(Count(e.0 * j.aut_factor()), zt, "d = {d}, j = {j}");
            }
        }
    }

    #[test]
    fn divisibility_rows() {
        let rows = divisibility_report(12).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!((rows[0].d, rows[0].nd_mod3, rows[0].d_mod3), (3, 0, 0));
        assert_eq!((rows[1].d, rows[1].nd_mod3, rows[1].d_mod3), (4, 2, 1));
        assert_eq!((rows[3].d, rows[3].nd_mod3, rows[3].d_mod3), (6, 0, 0));
        assert_eq!(
            BigInt::from(rows[3].nd_mod3),
            oracle_nd(6) % BigInt::from(3)
        );
        assert!(rows.iter().all(|r| !r.flagged));
        assert!(divisibility_report(2).is_err());
    }

    #[test]
    fn binomial_not_divisible_by_three_when_d_is() {
        for d in (3..=300).step_by(3) {
            assert_ne!(binomial(d - 1, 2).rem_small(3), 0, "d = {d}");
        }
    }

    #[test]
    fn table_rejects_bad_first_entry() {
        assert!(RecursionTable::from_values(vec![Count::from(2)]).is_err());
        assert!(RecursionTable::from_values(vec![]).is_err());
    }

    #[test]
    fn count_serializes_as_string() {
        let json = serde_json::to_string(&nd(12)).unwrap();
        assert_eq!(json, format!("\"{}\"", nd(12)));
    }

    proptest! {
        #[test]
        fn pascal_identity(n in 1i64..120, k in -2i64..125) {
            let lhs = binomial(n, k);
            let rhs = binomial(n - 1, k - 1).into_inner() + binomial(n - 1, k).into_inner();
            prop_assert_eq!(lhs.into_inner(), rhs);
        }

        #[test]
        fn binomial_symmetry(n in 0i64..200, k in 0i64..200) {
            prop_assume!(k <= n);
            prop_assert_eq!(binomial(n, k), binomial(n, n - k));
        }
    }
}
