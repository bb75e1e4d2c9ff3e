//! Versioned tables of length sets and catenary degrees, with JSON and CSV
//! forms that parse back to the same rows.

use std::fmt::Display;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::field::FieldElement;
use crate::algebra::local::{canonical_factorization, distance, factor_in_d, three_chain, LocalError};
use crate::gadgets::intr::{
    canonical_intr, catenary_intr_closed_form, chain_intr, factorization_intr, length_set_intr,
};
use crate::gadgets::{Base, GadgetError, IntRElement};
use crate::group::GroupElement;
use crate::monoid::{
    catenary_closed_form, length_set_bruteforce, length_set_closed_form, oracle_grid, LengthSet, MonoidError,
    MonoidSpec,
};
use crate::par::{par_map, Mode};
use crate::scalar::CoeffField;

pub const SCHEMA: &str = "1";

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad table header: {0}")]
    Header(String),
    #[error("empty range: no grid value in [{0}, {1}]")]
    EmptyRange(GroupElement, GroupElement),
}

/// Optional fields as their display string, empty for `None`.
mod opt_display {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(x: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_str(""),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        if s.is_empty() {
            return Ok(None);
        }
        s.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table<R> {
    pub schema: String,
    pub kind: String,
    pub monoid: String,
    pub field: String,
    pub rows: Vec<R>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRow {
    pub v: GroupElement,
    #[serde(with = "opt_display")]
    pub d_closed: Option<LengthSet>,
    #[serde(with = "opt_display")]
    pub d_brute: Option<LengthSet>,
    #[serde(with = "opt_display")]
    pub intr: Option<LengthSet>,
    /// Closed form and brute force agree, and the minimum is `⌊v/2⌋ + 1`.
    #[serde(with = "opt_display")]
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatenaryRow {
    pub v: GroupElement,
    pub c_d: u64,
    pub c_intr: u64,
    /// Factorizations along the constructed chain in `D`.
    pub d_chain: usize,
    pub d_max_step: u64,
    pub intr_chain: usize,
    pub intr_max_step: u64,
}

/// `k/q` for every `k` with `from ≤ k/q ≤ to`.
pub fn grid(from: &GroupElement, to: &GroupElement, q: u64) -> Vec<GroupElement> {
    let q = q as i64;
    let lo = from.scale_int(q).ceil_i64();
    let hi = to.scale_int(q).floor_i64();
    (lo..=hi).map(|k| GroupElement::frac(k, q)).collect()
}

fn rational_lcm(spec: &MonoidSpec, v: &GroupElement, q: u64) -> Option<u64> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let den = |x: &GroupElement| x.as_rational().and_then(|r| r.denom().to_u64());
    let mut l = q.lcm(&den(v)?);
    for iv in spec.intervals() {
        for x in [iv.lo(), iv.hi()].into_iter().flatten() {
            l = l.lcm(&den(x)?);
        }
    }
    Some(l)
}

fn t_power(field: CoeffField, v: &GroupElement, spec: &MonoidSpec) -> Result<IntRElement, TableError> {
    let e = IntRElement::t_pow(field, v.clone(), spec.group());
    Ok(e.certify(&Base::Monoid(spec.clone()))?)
}

/// One row per grid value: closed form (one-gap only), grid brute force
/// (rational monoids only) and the `IntR` length set of `t^v`.
pub fn lengths_table(
    spec: &MonoidSpec,
    field: CoeffField,
    from: &GroupElement,
    to: &GroupElement,
    q: u64,
    mode: Mode,
) -> Result<Table<LengthRow>, TableError> {
    let vs: Vec<GroupElement> = grid(from, to, q)
        .into_iter()
        .filter(|v| spec.contains_positive(v))
        .collect();
    if vs.is_empty() {
        return Err(TableError::EmptyRange(from.clone(), to.clone()));
    }
    let rows = par_map(mode, &vs, |v| -> Result<LengthRow, TableError> {
        let d_closed = spec.is_one_gap().then(|| length_set_closed_form(spec, v)).transpose()?;
        let d_brute = match rational_lcm(spec, v, q) {
            Some(l) => Some(length_set_bruteforce(spec, v, oracle_grid(spec, v, l), 1 << 32)?),
            None => None,
        };
        let intr = if spec.is_one_gap() {
            Some(length_set_intr(&t_power(field, v, spec)?, spec)?)
        } else {
            None
        };
        let agree = match (&d_closed, &d_brute) {
            (Some(c), Some(b)) => Some(c == b && c.min as i64 == v.halve().floor_i64() + 1),
            _ => None,
        };
        Ok(LengthRow {
            v: v.clone(),
            d_closed,
            d_brute,
            intr,
            agree,
        })
    });
    Ok(Table {
        schema: SCHEMA.into(),
        kind: "lengths".into(),
        monoid: spec.to_string(),
        field: field.to_string(),
        rows: rows.into_iter().collect::<Result<_, _>>()?,
    })
}

fn catenary_row(spec: &MonoidSpec, field: CoeffField, v: &GroupElement) -> Result<CatenaryRow, TableError> {
    let c_d = catenary_closed_form(spec, v)?;
    let x = FieldElement::t_pow(field, v.clone());
    let lengths = length_set_closed_form(spec, v)?;
    let canon = canonical_factorization(&x, spec)?;
    let short = factor_in_d(&x, spec, lengths.min)?;
    let chain = three_chain(&x, &short, &canon, spec)?.joined();
    let mut d_max_step = 0;
    for w in chain.windows(2) {
        d_max_step = d_max_step.max(distance(&w[0], &w[1], spec)?.value);
    }
    let d = t_power(field, v, spec)?;
    let c_intr = catenary_intr_closed_form(&d, spec)?;
    let (intr_chain, intr_max_step) = if v >= &GroupElement::integer(2) {
        let z = factorization_intr(&d, 2, spec)?;
        let c = chain_intr(&d, &z, &canonical_intr(&d, spec)?, spec)?;
        (c.steps.len(), c.max_step())
    } else {
        (1, 0)
    };
    Ok(CatenaryRow {
        v: v.clone(),
        c_d,
        c_intr,
        d_chain: chain.len(),
        d_max_step,
        intr_chain,
        intr_max_step,
    })
}

/// Closed-form catenary degrees next to the step sizes of constructed
/// chains, one-gap monoid only.
pub fn catenary_table(
    spec: &MonoidSpec,
    field: CoeffField,
    from: &GroupElement,
    to: &GroupElement,
    q: u64,
    mode: Mode,
) -> Result<Table<CatenaryRow>, TableError> {
    if !spec.is_one_gap() {
        return Err(MonoidError::NotOneGap.into());
    }
    let vs: Vec<GroupElement> = grid(from, to, q)
        .into_iter()
        .filter(|v| v >= &GroupElement::one())
        .collect();
    if vs.is_empty() {
        return Err(TableError::EmptyRange(from.clone(), to.clone()));
    }
    let rows = par_map(mode, &vs, |v| catenary_row(spec, field, v));
    Ok(Table {
        schema: SCHEMA.into(),
        kind: "catenary".into(),
        monoid: spec.to_string(),
        field: field.to_string(),
        rows: rows.into_iter().collect::<Result<_, _>>()?,
    })
}

impl<R: Serialize + DeserializeOwned> Table<R> {
    pub fn to_json(&self) -> Result<String, TableError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, TableError> {
        let t: Table<R> = serde_json::from_str(s)?;
        if t.schema != SCHEMA {
            return Err(TableError::Header(format!("schema {}", t.schema)));
        }
        Ok(t)
    }

    /// A `#` header line with the metadata, then a CSV header and rows.
    pub fn to_csv(&self) -> Result<String, TableError> {
        let head = serde_json::json!({
            "schema": self.schema,
            "kind": self.kind,
            "monoid": self.monoid,
            "field": self.field,
        });
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| TableError::Header(e.to_string()))?)
            .map_err(|e| TableError::Header(e.to_string()))?;
        Ok(format!("# {head}\n{body}"))
    }

    pub fn from_csv(s: &str) -> Result<Self, TableError> {
        let (first, body) = s.split_once('\n').ok_or_else(|| TableError::Header("missing".into()))?;
        let meta: serde_json::Value = serde_json::from_str(
            first
                .strip_prefix("# ")
                .ok_or_else(|| TableError::Header(first.into()))?,
        )?;
        let get = |k: &str| {
            meta.get(k)
                .and_then(|x| x.as_str())
                .map(str::to_string)
                .ok_or_else(|| TableError::Header(format!("no {k}")))
        };
        let schema = get("schema")?;
        if schema != SCHEMA {
            return Err(TableError::Header(format!("schema {schema}")));
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let rows = r.deserialize().collect::<Result<Vec<R>, _>>()?;
        Ok(Table {
            schema,
            kind: get("kind")?,
            monoid: get("monoid")?,
            field: get("field")?,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    #[test]
    fn one_gap_lengths_agree() {
        let spec = MonoidSpec::one_gap(Group::Rationals);
        let t = lengths_table(&spec, CoeffField::Rationals, &g(1, 1), &g(12, 1), 2, Mode::default()).unwrap();
        assert_eq!(t.rows.len(), 23);
        assert!(t.rows.iter().all(|r| r.agree == Some(true)));
        let back = Table::<LengthRow>::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back, t);
        let back = Table::<LengthRow>::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn section_four_lengths() {
        let spec: MonoidSpec = "Q: 0 u [2,3] u [4,inf)".parse().unwrap();
        let t = lengths_table(&spec, CoeffField::Rationals, &g(13, 1), &g(13, 1), 1, Mode::Sequential).unwrap();
        assert_eq!(t.rows[0].d_brute, Some("{5,6}".parse().unwrap()));
        assert_eq!(t.rows[0].d_closed, None);
    }

    #[test]
    fn catenary_rows() {
        let spec = MonoidSpec::one_gap(Group::Rationals);
        let t = catenary_table(&spec, CoeffField::Rationals, &g(10, 1), &g(10, 1), 1, Mode::Sequential).unwrap();
        let r = &t.rows[0];
        assert_eq!((r.c_d, r.c_intr), (3, 3));
        assert!(r.d_max_step <= 3 && r.intr_max_step <= 3, "{r:?}");
        let t = catenary_table(&spec, CoeffField::Rationals, &g(1, 1), &g(3, 1), 2, Mode::Sequential).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.c_d).collect::<Vec<_>>(), vec![0, 0, 2, 2, 3]);
        let back = Table::<CatenaryRow>::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
