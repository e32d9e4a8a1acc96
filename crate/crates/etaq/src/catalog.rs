//! The embedded 83-row catalog of eta-quotients whose Fourier coefficients
//! obey the closed divisor-sum formula, end-to-end verification of each row,
//! and a bounded exponent-box search that re-derives the catalog level by
//! level.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::dimension;
use crate::etaquotient::{cusp_matrix, EtaQuotient};
use crate::hecke::{closed_coefficient, scaled_transform_simplified, HeckeContext};
use crate::numtheory::{divisors, euler_phi};
use crate::qseries::eta_quotient_expansion;
use crate::{Error, Result};

/// Raw tab-separated catalog: `N  r  m_r  k  delta  Pi_sf`, one header line.
const TABLE_TSV: &str = include_str!("table.tsv");

/// FNV-1a-64 of the embedded TSV, guarding against silent edits. The
/// semantic guard is [`verify_entry`]'s derived-column check.
const TABLE_FNV1A: u64 = 0x8f28_e25f_6375_19a6;

/// Levels the catalog covers.
pub const CATALOG_LEVELS: [u64; 14] = [2, 3, 4, 6, 8, 9, 10, 12, 14, 15, 16, 18, 20, 32];

/// One catalog row: the eta-quotient plus its published columns.
#[derive(Clone, Debug)]
pub struct TableEntry {
    /// 1-based position in the catalog.
    pub index: usize,
    pub entry: EtaQuotient,
    pub m_r: u64,
    pub k: i64,
    pub delta: u8,
    pub pi_sf: u64,
}

impl TableEntry {
    /// Hecke context for this row at index `l`; rows are catalogued, so the
    /// closed formula applies.
    pub fn context(&self, l: u64) -> Result<HeckeContext<'_>> {
        HeckeContext::for_catalog(&self.entry, l)
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Parses the embedded catalog. Errors indicate a corrupt embedding, never
/// bad user input.
pub fn load_table() -> Result<Vec<TableEntry>> {
    let digest = fnv1a64(TABLE_TSV.as_bytes());
    if digest != TABLE_FNV1A {
        return Err(Error::CorruptTable(format!(
            "checksum mismatch: {digest:#018x}"
        )));
    }
    let mut lines = TABLE_TSV.lines();
    let header = lines.next().unwrap_or_default();
    if header != "N\tr\tm_r\tk\tdelta\tPi_sf" {
        return Err(Error::CorruptTable("unexpected header".into()));
    }
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(Error::CorruptTable(format!("row {}: wrong arity", i + 1)));
        }
        let parse_num = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::CorruptTable(format!("row {}: bad {what}", i + 1)))
        };
        let level = parse_num(fields[0], "level")?;
        let entry = EtaQuotient::parse(level, fields[1])
            .map_err(|e| Error::CorruptTable(format!("row {}: {e}", i + 1)))?;
        entries.push(TableEntry {
            index: i + 1,
            entry,
            m_r: parse_num(fields[2], "m_r")?,
            k: parse_num(fields[3], "k")? as i64,
            delta: parse_num(fields[4], "delta")? as u8,
            pi_sf: parse_num(fields[5], "Pi_sf")?,
        });
    }
    if entries.len() != 83 {
        return Err(Error::CorruptTable(format!(
            "expected 83 rows, found {}",
            entries.len()
        )));
    }
    let mut levels: Vec<u64> = entries.iter().map(|t| t.entry.level()).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels != CATALOG_LEVELS {
        return Err(Error::CorruptTable(format!(
            "unexpected level set {levels:?}"
        )));
    }
    Ok(entries)
}

/// The catalog, parsed once.
pub fn table() -> &'static [TableEntry] {
    static TABLE: OnceLock<Vec<TableEntry>> = OnceLock::new();
    TABLE.get_or_init(|| load_table().expect("embedded catalog parses"))
}

/// Whether an eta-quotient equals some catalog row.
pub fn is_catalog_row(e: &EtaQuotient) -> bool {
    table()
        .iter()
        .any(|t| t.entry.level() == e.level() && t.entry.exponents() == e.exponents())
}

/// One reason a row failed verification.
#[derive(Clone, Debug)]
pub enum CheckFailure {
    /// Closed formula disagreed with the expansion at index `l`.
    Coefficient {
        l: u64,
        expected: BigInt,
        got: BigInt,
    },
    /// Closed formula could not be evaluated at index `l`.
    Formula { l: u64, detail: String },
    /// A derived invariant disagreed with the published column.
    DerivedColumn {
        column: &'static str,
        expected: String,
        got: String,
    },
    /// Dimension formula inapplicable or value differs from 1.
    Dimension { detail: String },
    /// Transform failed to act as a scalar at `(l, n)`.
    EigenRelation { l: u64, n: i64, detail: String },
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckFailure::Coefficient { l, expected, got } => {
                write!(f, "coefficient l={l}: series {expected}, formula {got}")
            }
            CheckFailure::Formula { l, detail } => {
                write!(f, "formula failed at l={l}: {detail}")
            }
            CheckFailure::DerivedColumn {
                column,
                expected,
                got,
            } => {
                write!(f, "column {column}: published {expected}, derived {got}")
            }
            CheckFailure::Dimension { detail } => write!(f, "dimension: {detail}"),
            CheckFailure::EigenRelation { l, n, detail } => {
                write!(f, "eigen relation l={l} n={n}: {detail}")
            }
        }
    }
}

/// Structured outcome of verifying one catalog row.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub index: usize,
    pub level: u64,
    pub r_string: String,
    pub precision: usize,
    /// Indices `l ≡ 1 (mod m_r)`, `1 ≤ l < precision`, that were compared.
    pub coefficients_checked: usize,
    /// Transform indices exercised by the eigen-relation check.
    pub eigen_indices: Vec<u64>,
    pub failures: Vec<CheckFailure>,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Smallest `count` transform indices `l ≥ 2` with `l ≡ 1 (mod m_r)`.
pub fn first_admissible_indices(m_r: u64, count: usize) -> Vec<u64> {
    (2u64..)
        .filter(|l| l % m_r == 1 % m_r)
        .take(count)
        .collect()
}

/// Expands one row to the requested precision and checks everything the
/// closed formula rests on: the published columns, dimension 1, coefficient
/// agreement at every admissible index below the precision, and the
/// transform acting as a scalar for the first three admissible indices.
/// Failures are collected, not thrown.
pub fn verify_entry(t: &TableEntry, precision: usize) -> VerificationReport {
    assert!(precision >= 2, "verification needs precision at least 2");
    let mut failures = Vec::new();
    let inv = t.entry.derive();

    if inv.m_r != t.m_r {
        failures.push(CheckFailure::DerivedColumn {
            column: "m_r",
            expected: t.m_r.to_string(),
            got: inv.m_r.to_string(),
        });
    }
    match inv.integral_k() {
        Some(k) if k == t.k => {}
        other => failures.push(CheckFailure::DerivedColumn {
            column: "k",
            expected: t.k.to_string(),
            got: format!("{other:?}"),
        }),
    }
    if inv.delta != t.delta {
        failures.push(CheckFailure::DerivedColumn {
            column: "delta",
            expected: t.delta.to_string(),
            got: inv.delta.to_string(),
        });
    }
    if inv.pi_sf != BigInt::from(t.pi_sf) {
        failures.push(CheckFailure::DerivedColumn {
            column: "Pi_sf",
            expected: t.pi_sf.to_string(),
            got: inv.pi_sf.to_string(),
        });
    }

    match dimension::dim(&t.entry) {
        Ok(d) if d == BigRational::one() => {}
        Ok(d) => failures.push(CheckFailure::Dimension {
            detail: format!("value {d}"),
        }),
        Err(e) => failures.push(CheckFailure::Dimension {
            detail: e.to_string(),
        }),
    }

    let m_r = inv.m_r;
    let f = eta_quotient_expansion(&t.entry, precision);
    let mut coefficients_checked = 0;
    for l in (1..precision as u64).filter(|l| l % m_r == 1 % m_r) {
        let series_value = f.coefficient_at(l as i64).expect("within precision");
        match t.context(l).and_then(|ctx| closed_coefficient(&ctx)) {
            Ok(formula_value) => {
                coefficients_checked += 1;
                if formula_value != series_value {
                    failures.push(CheckFailure::Coefficient {
                        l,
                        expected: series_value,
                        got: formula_value,
                    });
                }
            }
            Err(e) => failures.push(CheckFailure::Formula {
                l,
                detail: e.to_string(),
            }),
        }
    }

    // Transform acts as a scalar: S(n) = S(0)·c_f(n) for the first three
    // admissible indices, at whatever range of n the precision supports.
    let eigen_indices = first_admissible_indices(m_r, 3);
    for &l in &eigen_indices {
        let n_max = ((precision as u64 - 1) / l).min(50) as i64;
        match eigen_check(t, l, &f, n_max) {
            Ok(None) => {}
            Ok(Some(fail)) => failures.push(fail),
            Err(e) => failures.push(CheckFailure::EigenRelation {
                l,
                n: -1,
                detail: e.to_string(),
            }),
        }
    }

    VerificationReport {
        index: t.index,
        level: t.entry.level(),
        r_string: t.entry.r_string(),
        precision,
        coefficients_checked,
        eigen_indices,
        failures,
    }
}

fn eigen_check(
    t: &TableEntry,
    l: u64,
    f: &crate::qseries::QSeries,
    n_max: i64,
) -> Result<Option<CheckFailure>> {
    let ctx = t.context(l)?;
    let s0 = scaled_transform_simplified(&ctx, &BigRational::from(BigInt::from(0)), f)?;
    for n in 0..=n_max {
        let sn = scaled_transform_simplified(&ctx, &BigRational::from(BigInt::from(n)), f)?;
        let cf_n = f.coefficient_at(n)?;
        let expected = s0.scale(&BigRational::from(cf_n));
        if sn != expected {
            return Ok(Some(CheckFailure::EigenRelation {
                l,
                n,
                detail: format!("S(n) = {sn}, S(0)·c_f(n) = {expected}"),
            }));
        }
    }
    Ok(None)
}

/// Verifies many rows in parallel; the report order matches the input order
/// regardless of worker count.
pub fn verify_all(entries: &[TableEntry], precision: usize) -> Vec<VerificationReport> {
    entries
        .par_iter()
        .map(|t| verify_entry(t, precision))
        .collect()
}

/// Bounded search configuration. The search box is `|r_n| ≤ bound` for every
/// divisor; the catalog's largest exponent magnitude is 17, so claiming a
/// level reproduction needs `bound ≥ 17`.
#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    pub level: u64,
    pub bound: i64,
    /// Weight cap; `None` derives the cap from the dimension formula.
    pub k_max: Option<u64>,
    /// When set, keep only candidates where the dimension formula applies
    /// and yields exactly 1.
    pub dimension_filter: bool,
}

impl EnumerationConfig {
    pub fn new(level: u64) -> Self {
        Self {
            level,
            bound: 20,
            k_max: None,
            dimension_filter: true,
        }
    }
}

/// Weight cap implied by asking the dimension formula for the value 1:
/// `(k-1)·m/12 ≤ 1 + (11/24)·Σ_c φ(gcd(c, N/c))`, rounded up.
pub fn k_max_for(level: u64) -> u64 {
    let m = dimension::index(level);
    let phi_sum: u64 = divisors(level)
        .iter()
        .map(|&c| euler_phi(num_integer::gcd(c, level / c)))
        .sum();
    let bound = BigRational::one()
        + BigRational::new(BigInt::from(12), BigInt::from(m))
            * (BigRational::one() + BigRational::new(BigInt::from(11 * phi_sum), BigInt::from(24)));
    u64::try_from(&bound.ceil().to_integer()).expect("weight cap fits u64")
}

/// Searches the exponent box for all vectors with `Σ n·r_n = 0`, even
/// exponent sum `2k` with `1 ≤ k ≤ k_max`, every cusp number nonnegative,
/// and (with the dimension filter on) an applicable dimension formula
/// yielding exactly 1. Deterministic output, sorted lexicographically in the
/// divisor-ordered exponents.
///
/// Two coordinates are never searched: the exponents at divisors 1 and at
/// the smallest prime are forced by the weight and order constraints, which
/// keeps the box small enough for every catalog level.
pub fn enumerate_level(cfg: &EnumerationConfig) -> Vec<EtaQuotient> {
    let level = cfg.level;
    assert!(level >= 1);
    let divs = divisors(level);
    if divs.len() == 1 {
        // only r_1 = 0 satisfies the order constraint, and its weight is 0
        return Vec::new();
    }
    let bound = cfg.bound;
    assert!(bound >= 0);
    let k_max = cfg.k_max.unwrap_or_else(|| k_max_for(level));
    let q = divs[1]; // smallest prime divisor
    let free: Vec<usize> = (2..divs.len()).rev().collect(); // big divisors first
    let matrix = cusp_matrix(level);
    let n_cusps = divs.len();

    // Suffix bounds over the yet-unassigned free positions plus the two
    // forced ones, for pruning.
    let mut results = Vec::new();
    let mut exps = vec![0i64; divs.len()];

    // remaining_span[d] = bound · Σ over free positions from depth d on of (n - 1)
    let mut remaining_span = vec![0i64; free.len() + 1];
    for d in (0..free.len()).rev() {
        remaining_span[d] = remaining_span[d + 1] + bound * (divs[free[d]] as i64 - 1);
    }
    // remaining_x[c][d] = bound · (Σ over free positions from depth d on of M[c][j]
    //                              + M[c][0] + M[c][1])
    let mut remaining_x = vec![vec![0i64; free.len() + 1]; n_cusps];
    for (c, row) in matrix.iter().enumerate() {
        remaining_x[c][free.len()] = bound * (row[0] + row[1]);
        for d in (0..free.len()).rev() {
            remaining_x[c][d] = remaining_x[c][d + 1] + bound * row[free[d]];
        }
    }

    for k in 1..=k_max {
        let two_k = 2 * k as i64;
        search(
            &SearchCtx {
                level,
                divs: &divs,
                free: &free,
                matrix: &matrix,
                bound,
                two_k,
                q: q as i64,
                remaining_span: &remaining_span,
                remaining_x: &remaining_x,
                dimension_filter: cfg.dimension_filter,
            },
            0,
            0,
            0,
            &mut vec![0i64; n_cusps],
            &mut exps,
            &mut results,
        );
    }

    results.sort_by(|a, b| a.exponents().cmp(b.exponents()));
    results
}

struct SearchCtx<'a> {
    level: u64,
    divs: &'a [u64],
    free: &'a [usize],
    matrix: &'a [Vec<i64>],
    bound: i64,
    two_k: i64,
    q: i64,
    remaining_span: &'a [i64],
    remaining_x: &'a [Vec<i64>],
    dimension_filter: bool,
}

#[allow(clippy::too_many_arguments)]
fn search(
    ctx: &SearchCtx<'_>,
    depth: usize,
    sum_free: i64,
    weighted_free: i64,
    x_partial: &mut Vec<i64>,
    exps: &mut Vec<i64>,
    results: &mut Vec<EtaQuotient>,
) {
    // feasibility of the two forced coordinates
    let v = sum_free - ctx.two_k - weighted_free;
    if v.abs() > ctx.bound * (ctx.q - 1) + ctx.remaining_span[depth] {
        return;
    }
    if (ctx.two_k - sum_free).abs() > 2 * ctx.bound + ctx.bound * (ctx.free.len() - depth) as i64 {
        return;
    }
    // every cusp number must still be reachable from below
    for (c, row) in ctx.remaining_x.iter().enumerate() {
        if x_partial[c] + row[depth] < 0 {
            return;
        }
    }

    if depth == ctx.free.len() {
        // force r_q and r_1 from the order and weight constraints
        let num = sum_free - ctx.two_k - weighted_free;
        if num.rem_euclid(ctx.q - 1) != 0 {
            return;
        }
        let r_q = num / (ctx.q - 1);
        let r_1 = ctx.two_k - sum_free - r_q;
        if r_q.abs() > ctx.bound || r_1.abs() > ctx.bound {
            return;
        }
        exps[0] = r_1;
        exps[1] = r_q;
        for (c, row) in ctx.matrix.iter().enumerate() {
            if x_partial[c] + row[0] * r_1 + row[1] * r_q < 0 {
                return;
            }
        }
        let candidate = EtaQuotient::new(ctx.level, exps.clone()).expect("valid vector");
        debug_assert_eq!(
            candidate
                .divisors()
                .iter()
                .zip(candidate.exponents())
                .map(|(&n, &r)| n as i64 * r)
                .sum::<i64>(),
            0
        );
        if ctx.dimension_filter {
            match dimension::dim(&candidate) {
                Ok(d) if d == BigRational::one() => results.push(candidate),
                _ => {}
            }
        } else {
            results.push(candidate);
        }
        return;
    }

    let pos = ctx.free[depth];
    let n = ctx.divs[pos] as i64;
    for r in -ctx.bound..=ctx.bound {
        exps[pos] = r;
        for (c, row) in ctx.matrix.iter().enumerate() {
            x_partial[c] += row[pos] * r;
        }
        search(
            ctx,
            depth + 1,
            sum_free + r,
            weighted_free + n * r,
            x_partial,
            exps,
            results,
        );
        for (c, row) in ctx.matrix.iter().enumerate() {
            x_partial[c] -= row[pos] * r;
        }
    }
    exps[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_loads_with_expected_shape() {
        let t = load_table().unwrap();
        assert_eq!(t.len(), 83);
        let first = &t[0];
        assert_eq!(first.entry.level(), 2);
        assert_eq!(first.entry.r_string(), "1^{4}2^{-2}");
        assert_eq!((first.m_r, first.k, first.delta, first.pi_sf), (4, 1, 0, 1));
        let last = &t[82];
        assert_eq!(last.entry.level(), 32);
        assert_eq!(last.entry.r_string(), "1^{0}2^{0}4^{2}8^{-1}16^{2}32^{-1}");
        assert_eq!((last.m_r, last.k, last.delta, last.pi_sf), (8, 1, 0, 1));
    }

    #[test]
    fn every_row_satisfies_structural_invariants() {
        for t in table() {
            let e = &t.entry;
            let inv = e.derive();
            assert_eq!(inv.x_n, 0, "row {}", t.index);
            assert!(e.is_integral_weight(), "row {}", t.index);
            assert!(e.is_holomorphic(), "row {}", t.index);
            assert!(e.condition7_holds(false), "row {}", t.index);
            // Even transform indices exist only when m_r is 1 or 3; those
            // rows must pass the parity condition for even indices too.
            if inv.m_r == 1 || inv.m_r == 3 {
                assert!(e.condition7_holds(true), "row {}", t.index);
            }
            assert!(e.psi_mult_ok(), "row {}", t.index);
            assert_eq!(inv.x_n, inv.x_at(e.level()), "row {}", t.index);
        }
    }

    #[test]
    fn derived_columns_match_published_columns() {
        for t in table() {
            let inv = t.entry.derive();
            assert_eq!(inv.m_r, t.m_r, "row {}", t.index);
            assert_eq!(inv.integral_k(), Some(t.k), "row {}", t.index);
            assert_eq!(inv.delta, t.delta, "row {}", t.index);
            assert_eq!(inv.pi_sf, BigInt::from(t.pi_sf), "row {}", t.index);
        }
    }

    #[test]
    fn r_strings_round_trip() {
        for t in table() {
            let parsed = EtaQuotient::parse(t.entry.level(), &t.entry.r_string()).unwrap();
            assert_eq!(parsed.r_string(), t.entry.r_string());
        }
    }

    #[test]
    fn catalog_membership() {
        let row = EtaQuotient::new(3, vec![3, -1]).unwrap();
        assert!(is_catalog_row(&row));
        let carlitz = EtaQuotient::new(3, vec![9, -3]).unwrap();
        assert!(!is_catalog_row(&carlitz));
    }

    #[test]
    fn verify_single_rows_quickly() {
        let t = table();
        let report = verify_entry(&t[5], 120); // the two-squares row
        assert!(report.verified(), "failures: {:?}", report.failures);
        assert_eq!(report.coefficients_checked, 119);
        let report = verify_entry(&t[3], 120); // level 3, m_r = 3
        assert!(report.verified(), "failures: {:?}", report.failures);
        assert_eq!(report.coefficients_checked, 40);
    }

    #[test]
    fn verify_flags_corrupted_columns() {
        let t = table();
        let mut bad = t[0].clone();
        bad.m_r += 1;
        let report = verify_entry(&bad, 30);
        assert!(!report.verified());
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, CheckFailure::DerivedColumn { column: "m_r", .. })));
    }

    #[test]
    fn admissible_index_sequences() {
        assert_eq!(first_admissible_indices(1, 3), vec![2, 3, 4]);
        assert_eq!(first_admissible_indices(2, 3), vec![3, 5, 7]);
        assert_eq!(first_admissible_indices(24, 3), vec![25, 49, 73]);
    }

    #[test]
    fn weight_caps() {
        assert!(k_max_for(2) >= 3);
        assert!(k_max_for(4) >= 3);
        assert_eq!(k_max_for(2), 9);
        for level in 1..=64 {
            assert!(k_max_for(level) >= 1);
            assert!(k_max_for(level) < 40, "cap stays small at level {level}");
        }
    }

    #[test]
    fn enumerate_level_two() {
        let found = enumerate_level(&EnumerationConfig::new(2));
        let expected: Vec<Vec<i64>> = table()
            .iter()
            .filter(|t| t.entry.level() == 2)
            .map(|t| t.entry.exponents().to_vec())
            .collect();
        let got: Vec<Vec<i64>> = found.iter().map(|e| e.exponents().to_vec()).collect();
        let mut expected_sorted = expected.clone();
        expected_sorted.sort();
        assert_eq!(got, expected_sorted);
    }

    #[test]
    fn enumerate_level_five_is_empty() {
        assert!(enumerate_level(&EnumerationConfig::new(5)).is_empty());
    }

    #[test]
    fn enumerate_level_one_is_empty() {
        assert!(enumerate_level(&EnumerationConfig::new(1)).is_empty());
    }

    #[test]
    fn enumerate_without_dimension_filter_is_superset() {
        let mut cfg = EnumerationConfig::new(2);
        cfg.dimension_filter = false;
        let unfiltered = enumerate_level(&cfg);
        let filtered = enumerate_level(&EnumerationConfig::new(2));
        assert!(filtered.len() <= unfiltered.len());
        for e in &filtered {
            assert!(unfiltered.contains(e));
        }
        // holomorphic candidates like (16, -8) with dimension 2 appear here
        assert!(unfiltered.iter().any(|e| e.exponents() == [16, -8]));
    }
}
