//! Signature-algorithm parameter sets and the CSV catalog that carries them.
//!
//! A catalog is a plain parameter table: each row names an algorithm and gives
//! its signature size, public-key size, the number of signatures one key pair
//! can produce, and the client-side cost of verifying one signature (in
//! millions of cycles). Nothing here checks that a row matches a real scheme.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::table::Table;

pub const COL_NAME: &str = "Name";
pub const COL_SIG_SIZE: &str = "Signature Size";
pub const COL_PK_SIZE: &str = "Public Key Size";
pub const COL_MAX_SIGS: &str = "Max Signatures";
pub const COL_COST: &str = "Computational Cost";

/// Largest accepted `Max Signatures` value.
pub const MAX_SIGS_LIMIT: u64 = i64::MAX as u64;

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureAlgorithm {
    pub name: String,
    /// Bytes in one signature.
    pub sig_size: u64,
    /// Bytes in one public key.
    pub pk_size: u64,
    /// Signatures one key pair may issue before it must be replaced.
    pub max_sigs: u64,
    /// Verification cost of one signature, in millions of cycles.
    pub cost: f64,
}

impl SignatureAlgorithm {
    /// Builds a parameter set, enforcing the catalog invariants.
    pub fn new(
        name: impl Into<String>,
        sig_size: u64,
        pk_size: u64,
        max_sigs: u64,
        cost: f64,
    ) -> Result<Self> {
        let alg = Self {
            name: name.into(),
            sig_size,
            pk_size,
            max_sigs,
            cost,
        };
        alg.validate()?;
        Ok(alg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidAlgorithm {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.name.trim().is_empty() {
            return Err(invalid("name is empty"));
        }
        if self.max_sigs == 0 {
            return Err(invalid("max signatures must be at least 1"));
        }
        if self.max_sigs > MAX_SIGS_LIMIT {
            return Err(invalid("max signatures exceeds 2^63-1"));
        }
        if !self.cost.is_finite() || self.cost < 0.0 {
            return Err(invalid(
                "computational cost must be a finite, non-negative number",
            ));
        }
        Ok(())
    }
}

impl fmt::Display for SignatureAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses an algorithm catalog from CSV text.
///
/// Header cells are matched after trimming, in any column order. `Max
/// Signatures` accepts plain integers as well as decimal and scientific
/// notation (`1E4`, `2.5e3`), truncated toward zero. Blank rows are skipped.
pub fn parse_algorithm_catalog(csv_text: &str) -> Result<Vec<SignatureAlgorithm>> {
    let table = Table::parse(csv_text)?;
    let name_col = table.column(COL_NAME)?;
    let sig_col = table.column(COL_SIG_SIZE)?;
    let pk_col = table.column(COL_PK_SIZE)?;
    let max_col = table.column(COL_MAX_SIGS)?;
    let cost_col = table.column(COL_COST)?;

    let mut seen = HashSet::new();
    let mut catalog = Vec::new();
    for row in table.rows() {
        let name = row.get(name_col).to_string();
        let sig_size = parse_size(row.get(sig_col))
            .ok_or_else(|| row.error(format!("`{COL_SIG_SIZE}` is not an integer")))?;
        let pk_size = parse_size(row.get(pk_col))
            .ok_or_else(|| row.error(format!("`{COL_PK_SIZE}` is not an integer")))?;
        let max_sigs = parse_count(row.get(max_col))
            .ok_or_else(|| row.error(format!("`{COL_MAX_SIGS}` is not a number")))?;
        let cost: f64 = row
            .get(cost_col)
            .parse()
            .map_err(|_| row.error(format!("`{COL_COST}` is not a number")))?;

        let invalid = |reason: &str| Error::InvalidAlgorithm {
            name: name.clone(),
            reason: reason.to_string(),
        };
        let sig_size =
            u64::try_from(sig_size).map_err(|_| invalid("signature size is negative"))?;
        let pk_size = u64::try_from(pk_size).map_err(|_| invalid("public key size is negative"))?;
        let max_sigs = match max_sigs {
            Count::Negative => return Err(invalid("max signatures must be at least 1")),
            Count::TooLarge => return Err(invalid("max signatures exceeds 2^63-1")),
            Count::Value(v) => v,
        };
        let alg = SignatureAlgorithm::new(name, sig_size, pk_size, max_sigs, cost)?;
        if !seen.insert(alg.name.clone()) {
            return Err(Error::DuplicateAlgorithm {
                row: row.line,
                name: alg.name,
            });
        }
        catalog.push(alg);
    }
    Ok(catalog)
}

/// Serializes a catalog in the same format [`parse_algorithm_catalog`] reads.
pub fn write_algorithm_catalog(catalog: &[SignatureAlgorithm]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([COL_NAME, COL_SIG_SIZE, COL_PK_SIZE, COL_MAX_SIGS, COL_COST])?;
    for alg in catalog {
        writer.write_record([
            alg.name.clone(),
            alg.sig_size.to_string(),
            alg.pk_size.to_string(),
            alg.max_sigs.to_string(),
            alg.cost.to_string(),
        ])?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// Returns the first catalog entry named exactly `name`.
pub fn find_algorithm<'a>(
    name: &str,
    catalog: &'a [SignatureAlgorithm],
) -> Result<&'a SignatureAlgorithm> {
    catalog
        .iter()
        .find(|alg| alg.name == name)
        .ok_or_else(|| Error::AlgorithmNotFound {
            name: name.to_string(),
        })
}

fn parse_size(text: &str) -> Option<i128> {
    text.parse::<i64>().ok().map(i128::from)
}

#[derive(Debug, PartialEq)]
enum Count {
    Value(u64),
    Negative,
    TooLarge,
}

/// Exact decimal parse of `[+-]digits[.digits][(e|E)[+-]digits]`, truncated
/// to an integer. Returns `None` for anything that is not such a literal.
fn parse_count(text: &str) -> Option<Count> {
    let (negative, rest) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match rest.find(['e', 'E']) {
        Some(i) => (&rest[..i], Some(&rest[i + 1..])),
        None => (rest, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let exponent: i64 = match exponent {
        Some(e) => e.parse().ok()?,
        None => 0,
    };

    // value = digits * 10^(exponent - frac_len)
    let digits: String = int_part.chars().chain(frac_part.chars()).collect();
    let digits = digits.trim_start_matches('0');
    let shift = exponent.checked_sub(frac_part.len() as i64)?;
    let kept: &str = if shift >= 0 {
        digits
    } else {
        let drop = usize::try_from(shift.unsigned_abs()).ok()?;
        &digits[..digits.len().saturating_sub(drop)]
    };
    if kept.is_empty() {
        return Some(Count::Value(0));
    }
    let too_large = if negative {
        Count::Negative
    } else {
        Count::TooLarge
    };
    // 19 significant digits already reach 2^63, so longer strings overflow.
    if kept.len() > 19 {
        return Some(too_large);
    }
    let mut value: u128 = kept.parse().ok()?;
    if shift > 0 {
        for _ in 0..shift {
            value *= 10;
            if value > u128::from(MAX_SIGS_LIMIT) {
                return Some(too_large);
            }
        }
    }
    if negative {
        return Some(Count::Negative);
    }
    if value > u128::from(MAX_SIGS_LIMIT) {
        return Some(Count::TooLarge);
    }
    Some(Count::Value(value as u64))
}
