//! Parameter schemas for registered tools, exported in the function-calling
//! shape of the chat wire protocol and used to check incoming arguments.

use serde_json::{json, Map, Value};

pub const SEQUENCE: &str = "sequence";
pub const SEQUENCE_REF: &str = "sequence_ref";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    String,
    Number,
    Integer,
    Boolean,
}

impl ParamKind {
    fn json_name(self) -> &'static str {
        match self {
            ParamKind::String => "string",
            ParamKind::Number => "number",
            ParamKind::Integer => "integer",
            ParamKind::Boolean => "boolean",
        }
    }

    fn accepts(self, v: &Value) -> bool {
        match self {
            ParamKind::String => v.is_string(),
            ParamKind::Number => v.is_number(),
            ParamKind::Integer => v.is_i64() || v.is_u64(),
            ParamKind::Boolean => v.is_boolean(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub description: String,
    pub required: bool,
    /// Inclusive bounds for numeric parameters.
    pub range: Option<(f64, f64)>,
}

impl ParamSpec {
    pub fn new(name: &str, kind: ParamKind, description: &str) -> Self {
        ParamSpec {
            name: name.to_string(),
            kind,
            description: description.to_string(),
            required: false,
            range: None,
        }
    }

    pub fn required(mut self) -> Self {
        self.required = true;
        self
    }

    pub fn range(mut self, lo: f64, hi: f64) -> Self {
        self.range = Some((lo, hi));
        self
    }
}

/// Named parameters of one tool. A schema that `takes_sequence` accepts
/// exactly one of `sequence` (literal residues) or `sequence_ref` (a name
/// bound in the session); both are implicit and need not be listed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParameterSchema {
    pub takes_sequence: bool,
    pub params: Vec<ParamSpec>,
}

impl ParameterSchema {
    pub fn sequence_tool() -> Self {
        ParameterSchema {
            takes_sequence: true,
            params: Vec::new(),
        }
    }

    pub fn with(mut self, spec: ParamSpec) -> Self {
        self.params.push(spec);
        self
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Check the non-sequence arguments: every key known, types and ranges
    /// respected, required keys present.
    pub fn check(&self, args: &Map<String, Value>) -> Result<(), String> {
        for (key, value) in args {
            if self.takes_sequence && (key == SEQUENCE || key == SEQUENCE_REF) {
                continue;
            }
            let spec = self.param(key).ok_or_else(|| format!("unknown argument '{key}'"))?;
            if !spec.kind.accepts(value) {
                return Err(format!("argument '{key}' must be of type {}", spec.kind.json_name()));
            }
            if let (Some((lo, hi)), Some(x)) = (spec.range, value.as_f64()) {
                if !(lo..=hi).contains(&x) {
                    return Err(format!("argument '{key}' must lie in [{lo}, {hi}], got {x}"));
                }
            }
        }
        if let Some(missing) = self.params.iter().find(|p| p.required && !args.contains_key(&p.name)) {
            return Err(format!("missing required argument '{}'", missing.name));
        }
        Ok(())
    }

    /// JSON-schema `parameters` object.
    pub fn to_json(&self) -> Value {
        let mut properties = Map::new();
        if self.takes_sequence {
            properties.insert(
                SEQUENCE_REF.into(),
                json!({"type": "string", "description": "Name of a session sequence, e.g. \"query\". Preferred over pasting residues."}),
            );
            properties.insert(
                SEQUENCE.into(),
                json!({"type": "string", "description": "Literal amino-acid sequence (use only when no reference fits)."}),
            );
        }
        for p in &self.params {
            let mut prop = Map::new();
            prop.insert("type".into(), p.kind.json_name().into());
            prop.insert("description".into(), p.description.clone().into());
            if let Some((lo, hi)) = p.range {
                prop.insert("minimum".into(), json!(lo));
                prop.insert("maximum".into(), json!(hi));
            }
            properties.insert(p.name.clone(), Value::Object(prop));
        }
        let required: Vec<&str> = self
            .params
            .iter()
            .filter(|p| p.required)
            .map(|p| p.name.as_str())
            .collect();
        json!({
            "type": "object",
            "properties": properties,
            "required": required,
            "additionalProperties": false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homology_like() -> ParameterSchema {
        ParameterSchema::sequence_tool()
            .with(ParamSpec::new("min_seq_id", ParamKind::Number, "identity floor").range(0.0, 1.0))
    }

    fn obj(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn accepts_known_arguments() {
        let s = homology_like();
        assert!(s
            .check(&obj(json!({"sequence_ref": "query", "min_seq_id": 0.3})))
            .is_ok());
        assert!(s.check(&obj(json!({"sequence_ref": "query"}))).is_ok());
    }

    #[test]
    fn rejects_unknown_wrong_type_and_out_of_range() {
        let s = homology_like();
        assert!(s
            .check(&obj(json!({"evalue": 1})))
            .unwrap_err()
            .contains("unknown argument 'evalue'"));
        assert!(s
            .check(&obj(json!({"min_seq_id": "high"})))
            .unwrap_err()
            .contains("type number"));
        assert!(s
            .check(&obj(json!({"min_seq_id": 1.5})))
            .unwrap_err()
            .contains("[0, 1]"));
    }

    #[test]
    fn required_parameters_are_enforced() {
        let s = ParameterSchema::default().with(ParamSpec::new("code", ParamKind::String, "source").required());
        assert!(s.check(&Map::new()).unwrap_err().contains("'code'"));
        // sequence keys are unknown to a schema that takes no sequence
        assert!(s.check(&obj(json!({"code": "1", "sequence": "M"}))).is_err());
    }

    #[test]
    fn export_lists_sequence_keys_first() {
        let v = homology_like().to_json();
        let keys: Vec<&String> = v["properties"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["sequence_ref", "sequence", "min_seq_id"]);
        assert_eq!(v["additionalProperties"], json!(false));
        assert_eq!(v["properties"]["min_seq_id"]["maximum"], json!(1.0));
    }
}
