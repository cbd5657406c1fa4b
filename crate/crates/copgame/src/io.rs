//! Graph serialization: a JSON interchange format and DOT export.
//!
//! The JSON format is `{"vertices": N, "edges": [[u,v],...], "annotations":
//! {name: [ids] | {"id": value}}}`. Output is byte-deterministic: edges are
//! emitted in lexicographic order and annotation keys sorted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::{Annotation, Graph, Vertex};

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    annotations: Map<String, Value>,
}

/// Serializes a graph to the JSON interchange format (pretty-printed).
pub fn graph_to_json(g: &Graph) -> String {
    let mut annotations = Map::new();
    for (name, ann) in g.annotations() {
        let v = match ann {
            Annotation::Set(ids) => Value::Array(ids.iter().map(|&i| Value::from(i)).collect()),
            Annotation::Map(m) => {
                let mut obj = Map::new();
                for (&k, &val) in m {
                    obj.insert(k.to_string(), Value::from(val));
                }
                Value::Object(obj)
            }
        };
        annotations.insert(name.clone(), v);
    }
    let doc = GraphJson {
        vertices: g.vertex_count(),
        edges: g.edges(),
        annotations,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail");
    s.push('\n');
    s
}

/// Parses a graph from the JSON interchange format.
pub fn graph_from_json(text: &str) -> Result<Graph> {
    let doc: GraphJson = serde_json::from_str(text)
        .map_err(|e| Error::invalid(format!("graph JSON parse error: {e}")))?;
    let mut g = Graph::build(doc.vertices, &doc.edges)?;
    for (name, value) in &doc.annotations {
        let ann = match value {
            Value::Array(items) => {
                let mut ids = Vec::with_capacity(items.len());
                for it in items {
                    let id = it
                        .as_u64()
                        .ok_or_else(|| {
                            Error::invalid(format!("annotation {name}: non-integer vertex id"))
                        })? as usize;
                    if id >= doc.vertices {
                        return Err(Error::invalid(format!(
                            "annotation {name}: vertex {id} out of range"
                        )));
                    }
                    ids.push(id);
                }
                ids.sort_unstable();
                ids.dedup();
                Annotation::Set(ids)
            }
            Value::Object(obj) => {
                let mut m = BTreeMap::new();
                for (k, v) in obj {
                    let id: usize = k.parse().map_err(|_| {
                        Error::invalid(format!("annotation {name}: bad vertex key {k:?}"))
                    })?;
                    if id >= doc.vertices {
                        return Err(Error::invalid(format!(
                            "annotation {name}: vertex {id} out of range"
                        )));
                    }
                    let val = v.as_i64().ok_or_else(|| {
                        Error::invalid(format!("annotation {name}: non-integer value"))
                    })?;
                    m.insert(id, val);
                }
                Annotation::Map(m)
            }
            _ => {
                return Err(Error::invalid(format!(
                    "annotation {name}: expected array or object"
                )))
            }
        };
        g.set_annotation(name, ann);
    }
    Ok(g)
}

/// Exports a graph as an undirected DOT document. Set annotations become
/// space-separated `class` attributes; map annotations become labels.
pub fn graph_to_dot(g: &Graph) -> String {
    let mut classes: BTreeMap<Vertex, Vec<&str>> = BTreeMap::new();
    let mut labels: BTreeMap<Vertex, Vec<String>> = BTreeMap::new();
    for (name, ann) in g.annotations() {
        match ann {
            Annotation::Set(ids) => {
                for &v in ids {
                    classes.entry(v).or_default().push(name);
                }
            }
            Annotation::Map(m) => {
                for (&v, &val) in m {
                    labels.entry(v).or_default().push(format!("{name}={val}"));
                }
            }
        }
    }
    let mut out = String::from("graph {\n");
    for v in 0..g.vertex_count() {
        let mut attrs = Vec::new();
        if let Some(cs) = classes.get(&v) {
            attrs.push(format!("class=\"{}\"", cs.join(" ")));
        }
        if let Some(ls) = labels.get(&v) {
            attrs.push(format!("label=\"{v}\\n{}\"", ls.join("\\n")));
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {v};");
        } else {
            let _ = writeln!(out, "  {v} [{}];", attrs.join(", "));
        }
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annotated_c4() -> Graph {
        let mut g = Graph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        g.set_annotation("corners", Annotation::Set(vec![0, 2]));
        let mut m = BTreeMap::new();
        m.insert(1, 7);
        m.insert(3, -2);
        g.set_annotation("weight", Annotation::Map(m));
        g
    }

    #[test]
    fn json_round_trip() {
        let g = annotated_c4();
        let text = graph_to_json(&g);
        let h = graph_from_json(&text).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.annotations(), g.annotations());
        // Byte-determinism: serialize → parse → serialize is the identity.
        assert_eq!(graph_to_json(&h), text);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(graph_from_json("{").is_err());
        assert!(graph_from_json(r#"{"vertices":2,"edges":[[0,5]]}"#).is_err());
        assert!(
            graph_from_json(r#"{"vertices":2,"edges":[],"annotations":{"a":[9]}}"#).is_err()
        );
        assert!(
            graph_from_json(r#"{"vertices":2,"edges":[],"annotations":{"a":3}}"#).is_err()
        );
        assert!(graph_from_json(
            r#"{"vertices":2,"edges":[],"annotations":{"a":{"x":1}}}"#
        )
        .is_err());
    }

    #[test]
    fn dot_export_shape() {
        let g = annotated_c4();
        let dot = graph_to_dot(&g);
        assert!(dot.starts_with("graph {\n"));
        assert!(dot.ends_with("}\n"));
        assert!(dot.contains("0 [class=\"corners\"]"));
        assert!(dot.contains("label=\"1\\nweight=7\""));
        assert!(dot.contains("  0 -- 1;\n"));
        assert_eq!(dot.matches(" -- ").count(), 4);
    }
}
