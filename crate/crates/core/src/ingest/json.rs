//! JSON interchange: `{name, nodes:[{id, kind, name?}], edges:[{source, target, guard?}]}`.
//! Unknown fields are rejected.

use serde_json::{json, Map, Value};

use super::{ErrorLocation, ParseError};
use crate::model::{ActivityModel, Edge, Location, Node, NodeKind};

struct Reader {
    errors: Vec<ParseError>,
}

impl Reader {
    fn err(&mut self, pointer: String, message: impl Into<String>) {
        self.errors
            .push(ParseError::new(ErrorLocation::Pointer(pointer), message));
    }

    fn object<'v>(
        &mut self,
        value: &'v Value,
        pointer: &str,
        allowed: &[&str],
    ) -> Option<&'v Map<String, Value>> {
        let Some(obj) = value.as_object() else {
            self.err(pointer.to_string(), "expected an object");
            return None;
        };
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                let mut e = ParseError::new(
                    ErrorLocation::Pointer(format!("{pointer}/{}", escape(key))),
                    format!("unknown field '{key}'"),
                );
                e.expected = allowed.iter().map(|s| s.to_string()).collect();
                self.errors.push(e);
            }
        }
        Some(obj)
    }

    fn string(&mut self, obj: &Map<String, Value>, pointer: &str, key: &str) -> Option<String> {
        match obj.get(key) {
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.err(format!("{pointer}/{key}"), format!("field '{key}' must be a string"));
                None
            }
            None => {
                self.err(pointer.to_string(), format!("missing field '{key}'"));
                None
            }
        }
    }

    fn opt_string(&mut self, obj: &Map<String, Value>, pointer: &str, key: &str) -> Option<String> {
        match obj.get(key) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.err(format!("{pointer}/{key}"), format!("field '{key}' must be a string"));
                None
            }
        }
    }

    fn array<'v>(&mut self, obj: &'v Map<String, Value>, key: &str) -> &'v [Value] {
        match obj.get(key) {
            Some(Value::Array(items)) => items,
            Some(_) => {
                self.err(format!("/{key}"), format!("field '{key}' must be an array"));
                &[]
            }
            None => {
                self.err(String::new(), format!("missing field '{key}'"));
                &[]
            }
        }
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// Parses the JSON form into a validated model.
pub fn parse_json(text: &str) -> Result<ActivityModel, Vec<ParseError>> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        vec![ParseError::new(
            ErrorLocation::Pointer(String::new()),
            format!("invalid JSON at line {} column {}: {e}", e.line(), e.column()),
        )]
    })?;
    let mut r = Reader { errors: Vec::new() };
    let Some(obj) = r.object(&root, "", &["name", "nodes", "edges"]) else {
        return Err(r.errors);
    };
    let name = r.string(obj, "", "name").unwrap_or_default();

    let mut nodes = Vec::new();
    for (i, item) in r.array(obj, "nodes").iter().enumerate() {
        let ptr = format!("/nodes/{i}");
        let Some(o) = r.object(item, &ptr, &["id", "kind", "name"]) else {
            continue;
        };
        let id = r.string(o, &ptr, "id");
        let kind = r.string(o, &ptr, "kind").and_then(|k| {
            let kind = NodeKind::from_keyword(&k);
            if kind.is_none() {
                let mut e = ParseError::new(
                    ErrorLocation::Pointer(format!("{ptr}/kind")),
                    format!("unknown node kind '{k}'"),
                );
                e.expected = NodeKind::ALL.iter().map(|k| k.keyword().to_string()).collect();
                r.errors.push(e);
            }
            kind
        });
        let display = r.opt_string(o, &ptr, "name");
        if let (Some(id), Some(kind)) = (id, kind) {
            let mut node = Node::new(id, kind);
            if let Some(display) = display {
                node.name = display;
            }
            nodes.push((node, ptr));
        }
    }

    let mut edges = Vec::new();
    for (i, item) in r.array(obj, "edges").iter().enumerate() {
        let ptr = format!("/edges/{i}");
        let Some(o) = r.object(item, &ptr, &["source", "target", "guard"]) else {
            continue;
        };
        let source = r.string(o, &ptr, "source");
        let target = r.string(o, &ptr, "target");
        let guard = r.opt_string(o, &ptr, "guard");
        if let (Some(source), Some(target)) = (source, target) {
            edges.push((Edge { source, target, guard }, ptr));
        }
    }

    if !r.errors.is_empty() {
        return Err(r.errors);
    }

    let node_ptrs: Vec<String> = nodes.iter().map(|(_, p)| p.clone()).collect();
    let edge_ptrs: Vec<String> = edges.iter().map(|(_, p)| p.clone()).collect();
    let model = ActivityModel::new(
        name,
        nodes.into_iter().map(|(n, _)| n).collect(),
        edges.into_iter().map(|(e, _)| e).collect(),
    );
    let report = model.validate();
    if report.is_valid() {
        return Ok(model);
    }
    Err(report
        .violations
        .into_iter()
        .map(|v| {
            let ptr = match &v.location {
                Location::Model => String::new(),
                Location::Node(i, _) => node_ptrs[*i].clone(),
                Location::Edge(e) => edge_ptrs[*e].clone(),
            };
            ParseError::new(ErrorLocation::Pointer(ptr), v.message)
        })
        .collect())
}

/// Pretty JSON rendering; `name` is omitted when it equals the id.
pub fn print_json(model: &ActivityModel) -> String {
    let nodes: Vec<Value> = model
        .nodes()
        .iter()
        .map(|n| {
            let mut o = json!({ "id": n.id, "kind": n.kind.keyword() });
            if n.name != n.id {
                o["name"] = json!(n.name);
            }
            o
        })
        .collect();
    let edges: Vec<Value> = model
        .edges()
        .iter()
        .map(|e| {
            let mut o = json!({ "source": e.source, "target": e.target });
            if let Some(g) = &e.guard {
                o["guard"] = json!(g);
            }
            o
        })
        .collect();
    let doc = json!({ "name": model.name(), "nodes": nodes, "edges": edges });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    text.push('\n');
    text
}
