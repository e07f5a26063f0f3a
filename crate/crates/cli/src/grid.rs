//! Hyperparameter grid files.
//!
//! Either a JSON array of points, each tagged with `kind`, or one object
//! whose list-valued fields are expanded into their cartesian product:
//!
//! ```json
//! {"kind": "random_forest", "max_depth": [20, 50], "n_estimators": 100}
//! ```

use anyhow::{bail, Context, Result};
use refdoc_core::classify::Hyperparams;
use serde_json::{Map, Value};

fn expand(obj: &Map<String, Value>) -> Vec<Map<String, Value>> {
    let mut points = vec![Map::new()];
    for (key, value) in obj {
        let choices: Vec<Value> = match value {
            Value::Array(items) => items.clone(),
            other => vec![other.clone()],
        };
        points = points
            .into_iter()
            .flat_map(|p| {
                choices.iter().map(move |c| {
                    let mut q = p.clone();
                    q.insert(key.clone(), c.clone());
                    q
                })
            })
            .collect();
    }
    points
}

pub fn parse(text: &str) -> Result<Vec<Hyperparams>> {
    let value: Value = serde_json::from_str(text).context("grid is not valid JSON")?;
    let points: Vec<Value> = match value {
        Value::Array(items) => items,
        Value::Object(obj) => expand(&obj).into_iter().map(Value::Object).collect(),
        _ => bail!("grid must be a JSON array or object"),
    };
    points
        .into_iter()
        .enumerate()
        .map(|(i, p)| serde_json::from_value(p).with_context(|| format!("grid point {i}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_expansion() {
        let g = parse(r#"{"kind": "knn", "n_neighbors": [1, 3, 5]}"#).unwrap();
        assert_eq!(g.len(), 3);
        let g = parse(r#"{"kind": "random_forest", "max_depth": [2, 4], "n_estimators": [10, 20]}"#).unwrap();
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn explicit_list() {
        let g = parse(r#"[{"kind": "multinomial_nb", "alpha": 0.5}, {"kind": "multinomial_nb", "alpha": 1.0}]"#).unwrap();
        assert_eq!(g[1], Hyperparams::MultinomialNb { alpha: 1.0 });
        assert!(parse(r#"{"kind": "knn"}"#).is_err());
    }
}
