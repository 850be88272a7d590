//! JSON forms of instances, tables and encodings.
//!
//! Scalars are written as JSON integers when they are integral and fit in
//! `i64`, and as strings `"a"` or `"a/b"` otherwise; both forms are read.

use serde_json::{json, Map, Value};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::lattice::EhrhartSamples;
use crate::polytope3::{AxialProblem, IntSystem, UniversalityEncoding};
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::tables::{AxialMargins, Margins2, PlanarMargins, Table2, Table3};

/// A parsed instance file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance<T> {
    TwoWay(Margins2<T>),
    /// Axial margins with an optional `p x q x s` cost.
    Axial(AxialProblem<T>),
    Planar(PlanarMargins<T>),
    /// `{y >= 0 : A y = b}` with an optional coordinate bound `U`.
    System {
        system: IntSystem,
        bound: Option<i64>,
    },
    Encoding(UniversalityEncoding<T>),
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn scalar_to_json<T: Scalar>(v: &T) -> Value {
    if v.is_integral() {
        if let Some(i) = v.to_bigint().and_then(|b| i64::try_from(b).ok()) {
            return Value::from(i);
        }
    }
    Value::String(format_scalar(v))
}

pub fn scalar_from_json<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(T::from_i64(i))
            } else {
                parse_scalar(&n.to_string())
                    .ok_or_else(|| bad(format!("{n} is not an exact rational")))
            }
        }
        Value::String(s) => parse_scalar(s).ok_or_else(|| bad(format!("{s:?} is not a rational"))),
        other => Err(bad(format!("expected a number, got {other}"))),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| bad(format!("missing field {key:?}")))
}

pub fn vector_from_json<T: Scalar>(v: &Value, what: &str) -> Result<Vec<T>> {
    array(v, what)?.iter().map(scalar_from_json).collect()
}

pub fn matrix_from_json<T: Scalar>(v: &Value, what: &str) -> Result<Vec<Vec<T>>> {
    array(v, what)?
        .iter()
        .map(|r| vector_from_json(r, what))
        .collect()
}

pub fn vector_to_json<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(scalar_to_json).collect())
}

pub fn matrix_to_json<T: Scalar>(rows: &[Vec<T>]) -> Value {
    Value::Array(rows.iter().map(|r| vector_to_json(r)).collect())
}

fn ints(v: &Value, what: &str) -> Result<Vec<i64>> {
    array(v, what)?
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| bad(format!("{what} entries must be 64-bit integers")))
        })
        .collect()
}

fn usize_tuple<const N: usize>(v: &Value, what: &str) -> Result<[usize; N]> {
    let xs = array(v, what)?;
    if xs.len() != N {
        return Err(bad(format!("{what} entries must have length {N}")));
    }
    let mut out = [0; N];
    for (o, x) in out.iter_mut().zip(xs) {
        *o = x
            .as_u64()
            .and_then(|x| usize::try_from(x).ok())
            .ok_or_else(|| bad(format!("{what} entries must be indices")))?;
    }
    Ok(out)
}

pub fn table2_to_json<T: Scalar>(x: &Table2<T>) -> Value {
    matrix_to_json(&x.rows())
}

pub fn table2_from_json<T: Scalar>(v: &Value) -> Result<Table2<T>> {
    Table2::from_rows(matrix_from_json(v, "table")?)
}

pub fn table3_to_json<T: Scalar>(x: &Table3<T>) -> Value {
    Value::Array(x.nested().iter().map(|m| matrix_to_json(m)).collect())
}

pub fn table3_from_json<T: Scalar>(v: &Value) -> Result<Table3<T>> {
    let slabs: Vec<Vec<Vec<T>>> = array(v, "table")?
        .iter()
        .map(|m| matrix_from_json(m, "table"))
        .collect::<Result<_>>()?;
    let p = slabs.len();
    let q = slabs.first().map_or(0, Vec::len);
    let s = slabs.first().and_then(|m| m.first()).map_or(0, Vec::len);
    if p == 0
        || q == 0
        || s == 0
        || slabs
            .iter()
            .any(|m| m.len() != q || m.iter().any(|r| r.len() != s))
    {
        return Err(Error::ShapeMismatch(
            "3-way table must be a non-empty p x q x s array".into(),
        ));
    }
    Ok(Table3::from_cells(
        p,
        q,
        s,
        slabs.into_iter().flatten().flatten().collect(),
    ))
}

pub fn margins2_to_json<T: Scalar>(m: &Margins2<T>) -> Value {
    json!({"kind": "2way", "u": vector_to_json(&m.u), "v": vector_to_json(&m.v)})
}

pub fn axial_to_json<T: Scalar>(m: &AxialMargins<T>) -> Value {
    json!({
        "kind": "axial",
        "u": vector_to_json(&m.u),
        "v": vector_to_json(&m.v),
        "w": vector_to_json(&m.w),
    })
}

pub fn planar_to_json<T: Scalar>(m: &PlanarMargins<T>) -> Value {
    json!({
        "kind": "planar",
        "U": matrix_to_json(&m.u),
        "V": matrix_to_json(&m.v),
        "W": matrix_to_json(&m.w),
    })
}

/// Axial margins plus the cost as a nested `p x q x s` array, when present.
pub fn axial_problem_to_json<T: Scalar>(pr: &AxialProblem<T>) -> Value {
    let mut v = axial_to_json(&pr.margins);
    if let Some(c) = &pr.cost {
        let (p, q, s) = pr.margins.shape();
        v["cost"] = table3_to_json(&Table3::from_cells(p, q, s, c.clone()));
    }
    v
}

/// Planar margins plus the cost as a nested array, when present.
pub fn planar_problem_to_json<T: Scalar>(margins: &PlanarMargins<T>, cost: Option<&[T]>) -> Value {
    let mut v = planar_to_json(margins);
    if let Some(c) = cost {
        let (p, q, s) = margins.shape();
        v["cost"] = table3_to_json(&Table3::from_cells(p, q, s, c.to_vec()));
    }
    v
}

pub fn system_to_json(sys: &IntSystem) -> Value {
    json!({"A": sys.a, "b": sys.b})
}

fn system_from_json(obj: &Map<String, Value>) -> Result<IntSystem> {
    let a = array(field(obj, "A")?, "A")?
        .iter()
        .map(|r| ints(r, "A"))
        .collect::<Result<Vec<_>>>()?;
    IntSystem::new(a, ints(field(obj, "b")?, "b")?)
}

pub fn encoding_to_json<T: Scalar>(enc: &UniversalityEncoding<T>) -> Value {
    json!({
        "kind": "encoding",
        "source": system_to_json(&enc.source),
        "reduced": system_to_json(&enc.reduced),
        "variables": enc.variables,
        "bound": enc.bound,
        "block_sizes": enc.block_sizes,
        "margins": axial_to_json(&enc.margins),
        "forbidden": enc.forbidden,
        "coordinate_map": enc.coordinate_map,
    })
}

fn encoding_from_json<T: Scalar>(obj: &Map<String, Value>) -> Result<UniversalityEncoding<T>> {
    let sys = |key: &str| -> Result<IntSystem> {
        let v = field(obj, key)?;
        system_from_json(
            v.as_object()
                .ok_or_else(|| bad(format!("{key} must be an object")))?,
        )
    };
    let margins = match parse_value(field(obj, "margins")?)? {
        Instance::Axial(p) => p.margins,
        _ => return Err(bad("encoding margins must be axial")),
    };
    let cells = |key: &str| -> Result<Vec<(usize, usize, usize)>> {
        array(field(obj, key)?, key)?
            .iter()
            .map(|c| usize_tuple::<3>(c, key).map(|[i, j, k]| (i, j, k)))
            .collect()
    };
    let variables = array(field(obj, "variables")?, "variables")?
        .iter()
        .map(|c| usize_tuple::<2>(c, "variables").map(|[j, s]| (j, s)))
        .collect::<Result<Vec<_>>>()?;
    let block_sizes = array(field(obj, "block_sizes")?, "block_sizes")?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| bad("block_sizes must be indices"))
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = field(obj, "bound")?
        .as_i64()
        .ok_or_else(|| bad("bound must be an integer"))?;
    let enc = UniversalityEncoding {
        source: sys("source")?,
        reduced: sys("reduced")?,
        variables,
        bound,
        block_sizes,
        margins,
        forbidden: cells("forbidden")?,
        coordinate_map: cells("coordinate_map")?,
    };
    let (p, q, s) = enc.shape();
    let inside = |&(i, j, k): &(usize, usize, usize)| i < p && j < q && k < s;
    if !enc.forbidden.iter().all(inside) || !enc.coordinate_map.iter().all(inside) {
        return Err(Error::ShapeMismatch(
            "encoding cell outside the table".into(),
        ));
    }
    if enc.coordinate_map.len() != enc.source.variables() {
        return Err(Error::ShapeMismatch(
            "coordinate map must cover every source variable".into(),
        ));
    }
    Ok(enc)
}

/// `{"id": ..., "samples": [[t, "count"], ...]}` with counts as decimal strings.
pub fn ehrhart_to_json(s: &EhrhartSamples) -> Value {
    let samples: Vec<Value> = s
        .samples
        .iter()
        .map(|(t, c)| json!([t, c.to_string()]))
        .collect();
    json!({"id": s.id, "samples": samples})
}

pub fn ehrhart_from_json(v: &Value) -> Result<EhrhartSamples> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("samples must be a JSON object"))?;
    let id = field(obj, "id")?
        .as_str()
        .ok_or_else(|| bad("id must be a string"))?
        .to_string();
    let samples = array(field(obj, "samples")?, "samples")?
        .iter()
        .map(|pair| {
            let pair = array(pair, "sample")?;
            let t = pair.first().and_then(Value::as_u64);
            let c = match pair.get(1) {
                Some(Value::String(s)) => s.parse::<BigUint>().ok(),
                Some(Value::Number(n)) => n.as_u64().map(BigUint::from),
                _ => None,
            };
            match (pair.len(), t, c) {
                (2, Some(t), Some(c)) => Ok((t, c)),
                _ => Err(bad("each sample must be [t, count]")),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EhrhartSamples { id, samples })
}

/// Reads any instance form; `kind` selects the variant.
pub fn parse_value<T: Scalar>(v: &Value) -> Result<Instance<T>> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("instance must be a JSON object"))?;
    let kind = field(obj, "kind")?
        .as_str()
        .ok_or_else(|| bad("kind must be a string"))?;
    match kind {
        "2way" => Ok(Instance::TwoWay(Margins2::new(
            vector_from_json(field(obj, "u")?, "u")?,
            vector_from_json(field(obj, "v")?, "v")?,
        )?)),
        "axial" => {
            let margins = AxialMargins::new(
                vector_from_json(field(obj, "u")?, "u")?,
                vector_from_json(field(obj, "v")?, "v")?,
                vector_from_json(field(obj, "w")?, "w")?,
            )?;
            let cost = match obj.get("cost") {
                None | Some(Value::Null) => None,
                Some(c) => {
                    let t: Table3<T> = table3_from_json(c)?;
                    if t.shape() != margins.shape() {
                        return Err(Error::ShapeMismatch(
                            "cost shape differs from the margins".into(),
                        ));
                    }
                    Some(t.cells().to_vec())
                }
            };
            Ok(Instance::Axial(AxialProblem::new(margins, cost)?))
        }
        "planar" => Ok(Instance::Planar(PlanarMargins::new(
            matrix_from_json(field(obj, "U")?, "U")?,
            matrix_from_json(field(obj, "V")?, "V")?,
            matrix_from_json(field(obj, "W")?, "W")?,
        )?)),
        "system" => {
            let bound = match obj.get("U") {
                None | Some(Value::Null) => None,
                Some(u) => Some(u.as_i64().ok_or_else(|| bad("U must be an integer"))?),
            };
            Ok(Instance::System {
                system: system_from_json(obj)?,
                bound,
            })
        }
        "encoding" => Ok(Instance::Encoding(encoding_from_json(obj)?)),
        other => Err(bad(format!("unknown kind {other:?}"))),
    }
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    parse_value(&v)
}

pub fn instance_to_json<T: Scalar>(inst: &Instance<T>) -> Value {
    match inst {
        Instance::TwoWay(m) => margins2_to_json(m),
        Instance::Axial(p) => axial_problem_to_json(p),
        Instance::Planar(m) => planar_to_json(m),
        Instance::System { system, bound } => {
            let mut v = system_to_json(system);
            v["kind"] = json!("system");
            if let Some(u) = bound {
                v["U"] = json!(u);
            }
            v
        }
        Instance::Encoding(e) => encoding_to_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope3::universality_encode;
    use crate::Rational;

    #[test]
    fn scalars_round_trip() {
        let half = Rational::from_frac(1, 2);
        assert_eq!(scalar_to_json(&half), json!("1/2"));
        assert_eq!(scalar_to_json(&Rational::from_i64(-7)), json!(-7));
        let big: Rational = parse_scalar("123456789012345678901234567890").unwrap();
        assert_eq!(
            scalar_to_json(&big),
            json!("123456789012345678901234567890")
        );
        for v in [json!(3), json!("3"), json!("6/2")] {
            assert_eq!(
                scalar_from_json::<Rational>(&v).unwrap(),
                Rational::from_i64(3)
            );
        }
        assert!(scalar_from_json::<Rational>(&json!(0.5)).is_err());
        assert!(scalar_from_json::<Rational>(&json!("1/0")).is_err());
    }

    #[test]
    fn instances_round_trip() {
        let texts = [
            r#"{"kind":"2way","u":[5,5,1],"v":[2,"7",2]}"#,
            r#"{"kind":"axial","u":[1,1],"v":[1,1],"w":[1,1],"cost":[[[1,2],[3,4]],[[5,6],[7,"1/2"]]]}"#,
            r#"{"kind":"planar","U":[[1,1],[1,1]],"V":[[1,1],[1,1]],"W":[[1,1],[1,1]]}"#,
            r#"{"kind":"system","A":[[3,-5,2]],"b":[7],"U":9}"#,
        ];
        for t in texts {
            let inst: Instance<Rational> = parse_instance(t).unwrap();
            let back: Instance<Rational> = parse_value(&instance_to_json(&inst)).unwrap();
            assert_eq!(inst, back);
        }
    }

    #[test]
    fn encoding_round_trip() {
        let sys = IntSystem::new(vec![vec![2]], vec![1]).unwrap();
        let enc = universality_encode::<Rational>(&sys, None).unwrap();
        let v = encoding_to_json(&enc);
        match parse_value::<Rational>(&v).unwrap() {
            Instance::Encoding(back) => assert_eq!(back, enc),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        for t in [
            "[]",
            r#"{"kind":"4way"}"#,
            r#"{"kind":"2way","u":[1]}"#,
            r#"{"kind":"2way","u":[-1],"v":[1]}"#,
            r#"{"kind":"axial","u":[1],"v":[1],"w":[1],"cost":[[[1,2]]]}"#,
            "not json",
        ] {
            assert!(parse_instance::<Rational>(t).is_err(), "{t}");
        }
    }

    #[test]
    fn ehrhart_samples() {
        let s = EhrhartSamples {
            id: "B_2".into(),
            samples: vec![(0, BigUint::from(1u8)), (5, BigUint::from(6u8))],
        };
        let v = ehrhart_to_json(&s);
        assert_eq!(v, json!({"id": "B_2", "samples": [[0, "1"], [5, "6"]]}));
        assert_eq!(ehrhart_from_json(&v).unwrap(), s);
        assert!(ehrhart_from_json(&json!({"id": "x", "samples": [[1]]})).is_err());
    }

    #[test]
    fn tables() {
        let x: Table3<Rational> = table3_from_json(&json!([[[1, 2]], [[3, "1/3"]]])).unwrap();
        assert_eq!(x.shape(), (2, 1, 2));
        assert_eq!(table3_to_json(&x), json!([[[1, 2]], [[3, "1/3"]]]));
        let y: Table2<Rational> = table2_from_json(&json!([[1, 0], [0, 1]])).unwrap();
        assert_eq!(table2_to_json(&y), json!([[1, 0], [0, 1]]));
        assert!(table3_from_json::<Rational>(&json!([[[1], [2, 3]]])).is_err());
    }
}
