//! JSON file format for DFAs:
//! `{"states": m, "alphabet": [..], "initial": 1, "finals": [..], "transitions": {"a": [..]}}`
//! where `transitions[x][q-1]` is the image of state `q` under letter `x`.

use serde_json::{json, Map, Value};

use crate::automata::{Dfa, Transformation};
use crate::error::{Error, Result};

/// Parses a DFA document, reporting the offending field on any bad entry.
pub fn parse_dfa(text: &str) -> Result<Dfa> {
    let value: Value = serde_json::from_str(text)?;
    dfa_from_value(&value)
}

fn positive(v: &Value, field: &str) -> Result<usize> {
    v.as_u64()
        .filter(|&x| x >= 1)
        .map(|x| x as usize)
        .ok_or_else(|| Error::field(field, format!("expected a positive integer, found {v}")))
}

fn state(v: &Value, field: &str, m: usize) -> Result<usize> {
    let q = positive(v, field)?;
    if q > m {
        return Err(Error::field(field, format!("state {q} outside 1..={m}")));
    }
    Ok(q)
}

pub fn dfa_from_value(value: &Value) -> Result<Dfa> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::field("<root>", "expected a JSON object"))?;
    let get = |key: &str| {
        obj.get(key)
            .ok_or_else(|| Error::field(key, "missing field"))
    };

    let m = positive(get("states")?, "states")?;

    let alphabet: Vec<String> = get("alphabet")?
        .as_array()
        .ok_or_else(|| Error::field("alphabet", "expected an array of letter names"))?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::field(format!("alphabet[{i}]"), "expected a string"))
        })
        .collect::<Result<_>>()?;
    if alphabet.is_empty() {
        return Err(Error::field("alphabet", "must not be empty"));
    }
    for (i, x) in alphabet.iter().enumerate() {
        if alphabet[..i].contains(x) {
            return Err(Error::field(
                format!("alphabet[{i}]"),
                format!("duplicate letter {x:?}"),
            ));
        }
    }

    let initial = state(get("initial")?, "initial", m)?;

    let finals = get("finals")?
        .as_array()
        .ok_or_else(|| Error::field("finals", "expected an array of state ids"))?
        .iter()
        .enumerate()
        .map(|(i, v)| state(v, &format!("finals[{i}]"), m))
        .collect::<Result<Vec<_>>>()?;

    let transitions = get("transitions")?
        .as_object()
        .ok_or_else(|| Error::field("transitions", "expected an object keyed by letter"))?;
    if let Some(extra) = transitions.keys().find(|x| !alphabet.contains(x)) {
        return Err(Error::field(
            format!("transitions.{extra}"),
            "letter not declared in alphabet",
        ));
    }
    let mut delta = Vec::with_capacity(alphabet.len());
    for x in &alphabet {
        let field = format!("transitions.{x}");
        let row = transitions
            .get(x)
            .ok_or_else(|| Error::field(&field, "missing transition row"))?
            .as_array()
            .ok_or_else(|| Error::field(&field, "expected an array of state ids"))?;
        if row.len() != m {
            return Err(Error::field(
                &field,
                format!("has {} entries, expected {m}", row.len()),
            ));
        }
        let images = row
            .iter()
            .enumerate()
            .map(|(q, v)| state(v, &format!("{field}[{q}]"), m))
            .collect::<Result<Vec<_>>>()?;
        delta.push(Transformation::new(&images)?);
    }
    Dfa::new(alphabet, delta, initial, &finals)
}

/// JSON value in the DFA file format; letter order is preserved.
pub fn dfa_to_value(d: &Dfa) -> Value {
    let mut transitions = Map::new();
    for (a, x) in d.alphabet().iter().enumerate() {
        transitions.insert(x.clone(), json!(d.delta(a).images()));
    }
    json!({
        "states": d.state_count(),
        "alphabet": d.alphabet(),
        "initial": d.initial(),
        "finals": d.finals(),
        "transitions": transitions,
    })
}

pub fn dfa_to_json(d: &Dfa) -> String {
    serde_json::to_string_pretty(&dfa_to_value(d)).expect("DFA values always serialize")
}
