//! JSON form of expression trees.
//!
//! ```json
//! {"kind": "prod", "factors": [
//!     {"kind": "sum", "terms": [{"kind": "coord", "index": 1},
//!                               {"kind": "const", "value": [-0.9, 0]}]},
//!     {"kind": "atompow", "r": "0.9", "exponent": "-3"}
//! ]}
//! ```
//!
//! Node kinds: `const`, `coord` (1-based index), `sum`, `prod`, `ipow`,
//! `atompow`, `atomlog`, `atomlogpow`, `unitary`, `compose`. Complex numbers
//! are `[re, im]` pairs; `r` and exponents of atoms are decimal strings (plain
//! JSON numbers are accepted on input).

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::symbols::HoloExpr;

pub fn expr_from_json(value: &Value) -> Result<HoloExpr> {
    parse_node(value, "$")
}

pub fn expr_from_json_at(value: &Value, path: &str) -> Result<HoloExpr> {
    parse_node(value, path)
}

pub fn expr_to_json(expr: &HoloExpr) -> Value {
    match expr {
        HoloExpr::Const(c) => json!({"kind": "const", "value": [c.re, c.im]}),
        HoloExpr::Coord(j) => json!({"kind": "coord", "index": j + 1}),
        HoloExpr::Sum(terms) => {
            json!({"kind": "sum", "terms": terms.iter().map(expr_to_json).collect::<Vec<_>>()})
        }
        HoloExpr::Prod(factors) => json!({
            "kind": "prod",
            "factors": factors.iter().map(expr_to_json).collect::<Vec<_>>()
        }),
        HoloExpr::IPow(base, m) => {
            json!({"kind": "ipow", "base": expr_to_json(base), "exponent": m})
        }
        HoloExpr::AtomPow { r, exponent } => json!({
            "kind": "atompow", "r": format!("{r:?}"), "exponent": format!("{exponent:?}")
        }),
        HoloExpr::AtomLog { r } => json!({"kind": "atomlog", "r": format!("{r:?}")}),
        HoloExpr::AtomLogPow { r, exponent } => json!({
            "kind": "atomlogpow", "r": format!("{r:?}"), "exponent": format!("{exponent:?}")
        }),
        HoloExpr::Unitary { matrix, inner } => {
            let rows: Vec<Value> = (0..matrix.nrows())
                .map(|i| {
                    Value::Array(
                        (0..matrix.ncols())
                            .map(|j| json!([matrix[(i, j)].re, matrix[(i, j)].im]))
                            .collect(),
                    )
                })
                .collect();
            json!({"kind": "unitary", "matrix": rows, "inner": expr_to_json(inner)})
        }
        HoloExpr::Compose { outer, inner } => json!({
            "kind": "compose",
            "outer": expr_to_json(outer),
            "inner": inner.iter().map(expr_to_json).collect::<Vec<_>>()
        }),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::symbol(path, format!("missing field `{name}`")))
}

fn parse_complex(value: &Value, path: &str) -> Result<Complex64> {
    match value {
        Value::Array(items) if items.len() == 2 => {
            let re = items[0].as_f64();
            let im = items[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Error::symbol(path, "complex entries must be numbers")),
            }
        }
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        _ => Err(Error::symbol(path, "expected a complex number [re, im]")),
    }
}

fn parse_decimal(value: &Value, path: &str) -> Result<f64> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::symbol(path, "expected a decimal string")),
    };
    Decimal::parse(&text)
        .map(|d| d.to_f64())
        .map_err(|e| Error::symbol(path, e.to_string()))
}

fn parse_list(value: &Value, path: &str) -> Result<Vec<HoloExpr>> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::symbol(path, "expected an array of nodes"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| parse_node(v, &format!("{path}[{i}]")))
        .collect()
}

fn relabel(err: Error, path: &str) -> Error {
    match err {
        Error::Symbol { message, .. } => Error::symbol(path, message),
        other => other,
    }
}

fn parse_node(value: &Value, path: &str) -> Result<HoloExpr> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::symbol(path, "expected a node object"))?;
    let kind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| Error::symbol(format!("{path}.kind"), "kind must be a string"))?;
    match kind {
        "const" => {
            let p = format!("{path}.value");
            let c = parse_complex(field(obj, "value", path)?, &p)?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::symbol(p, "non-finite constant"));
            }
            Ok(HoloExpr::Const(c))
        }
        "coord" => {
            let p = format!("{path}.index");
            let index = field(obj, "index", path)?
                .as_u64()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::symbol(&p, "index must be an integer >= 1"))?;
            Ok(HoloExpr::Coord(index as usize - 1))
        }
        "sum" => Ok(HoloExpr::Sum(parse_list(
            field(obj, "terms", path)?,
            &format!("{path}.terms"),
        )?)),
        "prod" => Ok(HoloExpr::Prod(parse_list(
            field(obj, "factors", path)?,
            &format!("{path}.factors"),
        )?)),
        "ipow" => {
            let base = parse_node(field(obj, "base", path)?, &format!("{path}.base"))?;
            let p = format!("{path}.exponent");
            let m = field(obj, "exponent", path)?
                .as_u64()
                .filter(|&m| m <= u32::MAX as u64)
                .ok_or_else(|| Error::symbol(&p, "exponent must be a nonnegative integer"))?;
            Ok(base.pow(m as u32))
        }
        "atompow" | "atomlog" | "atomlogpow" => {
            let r = parse_decimal(field(obj, "r", path)?, &format!("{path}.r"))?;
            let node = if kind == "atomlog" {
                HoloExpr::atom_log(r)
            } else {
                let p = format!("{path}.exponent");
                let e = parse_decimal(field(obj, "exponent", path)?, &p)?;
                if kind == "atompow" {
                    HoloExpr::atom_pow(r, e)
                } else {
                    HoloExpr::atom_log_pow(r, e)
                }
            };
            node.map_err(|e| relabel(e, path))
        }
        "unitary" => {
            let p = format!("{path}.matrix");
            let rows = field(obj, "matrix", path)?
                .as_array()
                .ok_or_else(|| Error::symbol(&p, "matrix must be an array of rows"))?;
            let n = rows.len();
            let mut entries = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .filter(|r| r.len() == n)
                    .ok_or_else(|| Error::symbol(format!("{p}[{i}]"), "matrix must be square"))?;
                for (j, entry) in row.iter().enumerate() {
                    entries.push(parse_complex(entry, &format!("{p}[{i}][{j}]"))?);
                }
            }
            let matrix = CMatrix::from_row_slice(n, n, &entries);
            let inner = parse_node(field(obj, "inner", path)?, &format!("{path}.inner"))?;
            HoloExpr::unitary(matrix, inner).map_err(|e| relabel(e, &p))
        }
        "compose" => {
            let outer = parse_node(field(obj, "outer", path)?, &format!("{path}.outer"))?;
            let inner = parse_list(field(obj, "inner", path)?, &format!("{path}.inner"))?;
            Ok(HoloExpr::compose(outer, inner))
        }
        other => Err(Error::symbol(
            format!("{path}.kind"),
            format!("unknown node kind `{other}`"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BallPoint;
    use crate::linalg::random_unitary;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parses_documented_example() {
        let v: Value = serde_json::from_str(
            r#"{"kind": "prod", "factors": [
                {"kind": "sum", "terms": [{"kind": "coord", "index": 1},
                                          {"kind": "const", "value": [-0.9, 0]}]},
                {"kind": "atompow", "r": "0.9", "exponent": "-3"}]}"#,
        )
        .unwrap();
        let f = expr_from_json(&v).unwrap();
        let z = BallPoint::from_reals(&[0.5]).unwrap();
        let expected = (0.5 - 0.9) / (1.0f64 - 0.45).powi(3);
        assert!((f.eval(&z).re - expected).abs() < 1e-12);
    }

    #[test]
    fn errors_carry_paths() {
        let v: Value = serde_json::from_str(
            r#"{"kind": "sum", "terms": [{"kind": "coord", "index": 1},
                {"kind": "atompow", "r": "0.5", "exponent": "1.2.3"}]}"#,
        )
        .unwrap();
        match expr_from_json(&v) {
            Err(Error::Symbol { path, .. }) => assert_eq!(path, "$.terms[1].exponent"),
            other => panic!("unexpected {other:?}"),
        }
        let v = json!({"kind": "atomlog", "r": "1.5"});
        assert!(matches!(expr_from_json(&v), Err(Error::Symbol { .. })));
        let v = json!({"kind": "conj", "inner": {"kind": "coord", "index": 1}});
        assert!(expr_from_json(&v).is_err());
        let v = json!({"kind": "coord", "index": 0});
        assert!(expr_from_json(&v).is_err());
    }

    fn arb_expr() -> impl Strategy<Value = HoloExpr> {
        let leaf = prop_oneof![
            (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| HoloExpr::Const(Complex64::new(a, b))),
            (0usize..2).prop_map(HoloExpr::Coord),
            (0.05f64..0.95, -3.0f64..3.0).prop_map(|(r, e)| HoloExpr::AtomPow { r, exponent: e }),
            (0.05f64..0.95).prop_map(|r| HoloExpr::AtomLog { r }),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..3).prop_map(HoloExpr::Sum),
                prop::collection::vec(inner.clone(), 1..3).prop_map(HoloExpr::Prod),
                (inner.clone(), 0u32..4).prop_map(|(b, m)| b.pow(m)),
                (inner, any::<u64>()).prop_map(|(e, seed)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    HoloExpr::unitary(random_unitary(2, &mut rng), e).unwrap()
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn json_round_trip_preserves_values(f in arb_expr(), x in -0.45f64..0.45, y in -0.45f64..0.45) {
            let back = expr_from_json(&expr_to_json(&f)).unwrap();
            let z = BallPoint::from_coords(vec![Complex64::new(x, y), Complex64::new(y, -x)]).unwrap();
            let (a, b) = (f.eval(&z), back.eval(&z));
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}
