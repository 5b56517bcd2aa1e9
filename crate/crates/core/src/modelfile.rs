//! Human-editable JSON description of a manipulator and its legs, with
//! schema validation that reports the exact field path of the first
//! violation, plus lossless re-serialization.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde_json::{json, Map, Value};
use std::fmt;

use crate::chain::{ChainElement, ChainModel, SpringAxis, SpringElement};
use crate::error::StiffnessError;
use crate::spatial::Transform;

/// Schema violation at a specific field path.
#[derive(Debug, Clone)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SchemaError {}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError {
        path: path.to_string(),
        message: message.into(),
    })
}

/// Rotation plus translation, as written in the model file.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    pub rotation: Option<[[f64; 3]; 3]>,
    pub translation: Option<[f64; 3]>,
}

impl TransformSpec {
    pub fn to_transform(&self) -> Result<Transform, StiffnessError> {
        let rotation = self
            .rotation
            .map(|r| Matrix3::from_fn(|i, j| r[i][j]))
            .unwrap_or_else(Matrix3::identity);
        let translation = self
            .translation
            .map(|t| Vector3::new(t[0], t[1], t[2]))
            .unwrap_or_else(Vector3::zeros);
        Transform::new(rotation, translation)
    }
}

/// One chain element, as written in the model file.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementSpec {
    RigidLink {
        translation: [f64; 3],
        rotation: Option<[[f64; 3]; 3]>,
    },
    VirtualSpring {
        axes: Vec<String>,
        stiffness: Vec<Vec<f64>>,
    },
    PassiveRevolute {
        axis: [f64; 3],
    },
    PassivePrismatic {
        axis: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegSpec {
    pub base: Option<TransformSpec>,
    pub elements: Vec<ElementSpec>,
    pub lever_v: Option<[f64; 3]>,
    pub orientation_r: Option<[[f64; 3]; 3]>,
}

/// Parsed model file: a reference frame and a list of legs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub frame: Option<TransformSpec>,
    pub legs: Vec<LegSpec>,
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    v.as_object()
        .ok_or(())
        .or_else(|_| err(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, SchemaError> {
    v.as_array()
        .ok_or(())
        .or_else(|_| err(path, "expected an array"))
}

fn as_number(v: &Value, path: &str) -> Result<f64, SchemaError> {
    v.as_f64().ok_or(()).or_else(|_| err(path, "expected a number"))
}

fn parse_vec3(v: &Value, path: &str) -> Result<[f64; 3], SchemaError> {
    let arr = as_array(v, path)?;
    if arr.len() != 3 {
        return err(path, format!("expected 3 numbers, got {}", arr.len()));
    }
    let mut out = [0.0; 3];
    for (i, item) in arr.iter().enumerate() {
        out[i] = as_number(item, &format!("{path}[{i}]"))?;
    }
    Ok(out)
}

fn parse_mat3(v: &Value, path: &str) -> Result<[[f64; 3]; 3], SchemaError> {
    let arr = as_array(v, path)?;
    if arr.len() != 3 {
        return err(path, format!("expected 3 rows, got {}", arr.len()));
    }
    let mut out = [[0.0; 3]; 3];
    for (i, row) in arr.iter().enumerate() {
        out[i] = parse_vec3(row, &format!("{path}[{i}]"))?;
    }
    Ok(out)
}

fn check_known_keys(
    obj: &Map<String, Value>,
    allowed: &[&str],
    path: &str,
) -> Result<(), SchemaError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return err(&format!("{path}.{key}"), "unknown field");
        }
    }
    Ok(())
}

fn parse_transform(v: &Value, path: &str) -> Result<TransformSpec, SchemaError> {
    let obj = as_object(v, path)?;
    check_known_keys(obj, &["rotation", "translation"], path)?;
    let rotation = obj
        .get("rotation")
        .map(|r| parse_mat3(r, &format!("{path}.rotation")))
        .transpose()?;
    let translation = obj
        .get("translation")
        .map(|t| parse_vec3(t, &format!("{path}.translation")))
        .transpose()?;
    Ok(TransformSpec {
        rotation,
        translation,
    })
}

const AXIS_NAMES: [(&str, SpringAxis); 6] = [
    ("tx", SpringAxis::Tx),
    ("ty", SpringAxis::Ty),
    ("tz", SpringAxis::Tz),
    ("rx", SpringAxis::Rx),
    ("ry", SpringAxis::Ry),
    ("rz", SpringAxis::Rz),
];

fn parse_element(v: &Value, path: &str) -> Result<ElementSpec, SchemaError> {
    let obj = as_object(v, path)?;
    let type_path = format!("{path}.type");
    let kind = obj
        .get("type")
        .ok_or(())
        .or_else(|_| err(&type_path, "missing required field"))?;
    let kind = kind
        .as_str()
        .ok_or(())
        .or_else(|_| err(&type_path, "expected a string"))?;
    match kind {
        "rigid_link" => {
            check_known_keys(obj, &["type", "translation", "rotation"], path)?;
            let translation = obj
                .get("translation")
                .ok_or(())
                .or_else(|_| err(&format!("{path}.translation"), "missing required field"))?;
            Ok(ElementSpec::RigidLink {
                translation: parse_vec3(translation, &format!("{path}.translation"))?,
                rotation: obj
                    .get("rotation")
                    .map(|r| parse_mat3(r, &format!("{path}.rotation")))
                    .transpose()?,
            })
        }
        "virtual_spring" => {
            check_known_keys(obj, &["type", "axes", "stiffness"], path)?;
            let axes_path = format!("{path}.axes");
            let axes_val = obj
                .get("axes")
                .ok_or(())
                .or_else(|_| err(&axes_path, "missing required field"))?;
            let mut axes = Vec::new();
            for (i, item) in as_array(axes_val, &axes_path)?.iter().enumerate() {
                let item_path = format!("{axes_path}[{i}]");
                let name = item
                    .as_str()
                    .ok_or(())
                    .or_else(|_| err(&item_path, "expected a string"))?;
                if !AXIS_NAMES.iter().any(|(n, _)| *n == name) {
                    return err(&item_path, format!("unknown spring axis `{name}`"));
                }
                axes.push(name.to_string());
            }
            let stiff_path = format!("{path}.stiffness");
            let stiff_val = obj
                .get("stiffness")
                .ok_or(())
                .or_else(|_| err(&stiff_path, "missing required field"))?;
            let rows = as_array(stiff_val, &stiff_path)?;
            if rows.len() != axes.len() {
                return err(
                    &stiff_path,
                    format!("expected {} rows to match `axes`, got {}", axes.len(), rows.len()),
                );
            }
            let mut stiffness = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let row_path = format!("{stiff_path}[{i}]");
                let cols = as_array(row, &row_path)?;
                if cols.len() != axes.len() {
                    return err(&row_path, format!("expected {} numbers", axes.len()));
                }
                let mut out = Vec::new();
                for (j, item) in cols.iter().enumerate() {
                    out.push(as_number(item, &format!("{row_path}[{j}]"))?);
                }
                stiffness.push(out);
            }
            Ok(ElementSpec::VirtualSpring { axes, stiffness })
        }
        "passive_revolute" | "passive_prismatic" => {
            check_known_keys(obj, &["type", "axis"], path)?;
            let axis_val = obj
                .get("axis")
                .ok_or(())
                .or_else(|_| err(&format!("{path}.axis"), "missing required field"))?;
            let axis = parse_vec3(axis_val, &format!("{path}.axis"))?;
            Ok(if kind == "passive_revolute" {
                ElementSpec::PassiveRevolute { axis }
            } else {
                ElementSpec::PassivePrismatic { axis }
            })
        }
        other => err(&type_path, format!("unknown element type `{other}`")),
    }
}

fn parse_leg(v: &Value, path: &str) -> Result<LegSpec, SchemaError> {
    let obj = as_object(v, path)?;
    check_known_keys(obj, &["base", "elements", "lever_v", "orientation_R"], path)?;
    let elements_path = format!("{path}.elements");
    let elements_val = obj
        .get("elements")
        .ok_or(())
        .or_else(|_| err(&elements_path, "missing required field"))?;
    let mut elements = Vec::new();
    for (i, item) in as_array(elements_val, &elements_path)?.iter().enumerate() {
        elements.push(parse_element(item, &format!("{elements_path}[{i}]"))?);
    }
    Ok(LegSpec {
        base: obj
            .get("base")
            .map(|b| parse_transform(b, &format!("{path}.base")))
            .transpose()?,
        elements,
        lever_v: obj
            .get("lever_v")
            .map(|l| parse_vec3(l, &format!("{path}.lever_v")))
            .transpose()?,
        orientation_r: obj
            .get("orientation_R")
            .map(|r| parse_mat3(r, &format!("{path}.orientation_R")))
            .transpose()?,
    })
}

impl ModelFile {
    pub fn from_value(v: &Value) -> Result<Self, SchemaError> {
        let obj = as_object(v, "")?;
        check_known_keys(obj, &["frame", "legs"], "")?;
        let legs_val = obj
            .get("legs")
            .ok_or(())
            .or_else(|_| err("legs", "missing required field"))?;
        let legs_arr = as_array(legs_val, "legs")?;
        if legs_arr.is_empty() {
            return err("legs", "at least one leg is required");
        }
        let mut legs = Vec::new();
        for (i, item) in legs_arr.iter().enumerate() {
            legs.push(parse_leg(item, &format!("legs[{i}]"))?);
        }
        Ok(Self {
            frame: obj
                .get("frame")
                .map(|f| parse_transform(f, "frame"))
                .transpose()?,
            legs,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, SchemaError> {
        let value: Value = serde_json::from_str(s).map_err(|e| SchemaError {
            path: String::new(),
            message: format!("invalid JSON: {e}"),
        })?;
        Self::from_value(&value)
    }

    /// Lossless re-serialization of the parsed record.
    pub fn to_value(&self) -> Value {
        let transform_value = |t: &TransformSpec| -> Value {
            let mut m = Map::new();
            if let Some(r) = t.rotation {
                m.insert("rotation".into(), json!(r));
            }
            if let Some(tr) = t.translation {
                m.insert("translation".into(), json!(tr));
            }
            Value::Object(m)
        };
        let element_value = |e: &ElementSpec| -> Value {
            match e {
                ElementSpec::RigidLink {
                    translation,
                    rotation,
                } => {
                    let mut m = Map::new();
                    m.insert("type".into(), json!("rigid_link"));
                    m.insert("translation".into(), json!(translation));
                    if let Some(r) = rotation {
                        m.insert("rotation".into(), json!(r));
                    }
                    Value::Object(m)
                }
                ElementSpec::VirtualSpring { axes, stiffness } => json!({
                    "type": "virtual_spring",
                    "axes": axes,
                    "stiffness": stiffness,
                }),
                ElementSpec::PassiveRevolute { axis } => {
                    json!({ "type": "passive_revolute", "axis": axis })
                }
                ElementSpec::PassivePrismatic { axis } => {
                    json!({ "type": "passive_prismatic", "axis": axis })
                }
            }
        };
        let legs: Vec<Value> = self
            .legs
            .iter()
            .map(|leg| {
                let mut m = Map::new();
                if let Some(base) = &leg.base {
                    m.insert("base".into(), transform_value(base));
                }
                m.insert(
                    "elements".into(),
                    Value::Array(leg.elements.iter().map(element_value).collect()),
                );
                if let Some(l) = leg.lever_v {
                    m.insert("lever_v".into(), json!(l));
                }
                if let Some(r) = leg.orientation_r {
                    m.insert("orientation_R".into(), json!(r));
                }
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        if let Some(frame) = &self.frame {
            root.insert("frame".into(), transform_value(frame));
        }
        root.insert("legs".into(), Value::Array(legs));
        Value::Object(root)
    }

    /// Builds the computational chain models, one per leg, with their lever
    /// and orientation.
    pub fn build(&self) -> Result<Vec<BuiltLeg>, StiffnessError> {
        self.legs
            .iter()
            .map(|leg| {
                let base = leg
                    .base
                    .as_ref()
                    .map(|b| b.to_transform())
                    .transpose()?
                    .unwrap_or_else(Transform::identity);
                let elements = leg
                    .elements
                    .iter()
                    .map(|e| -> Result<ChainElement, StiffnessError> {
                        Ok(match e {
                            ElementSpec::RigidLink {
                                translation,
                                rotation,
                            } => ChainElement::RigidLink(
                                TransformSpec {
                                    rotation: *rotation,
                                    translation: Some(*translation),
                                }
                                .to_transform()?,
                            ),
                            ElementSpec::VirtualSpring { axes, stiffness } => {
                                let axes: Vec<SpringAxis> = axes
                                    .iter()
                                    .map(|name| {
                                        AXIS_NAMES
                                            .iter()
                                            .find(|(n, _)| n == name)
                                            .map(|(_, a)| *a)
                                            .expect("axis validated at parse time")
                                    })
                                    .collect();
                                let d = axes.len();
                                let stiffness =
                                    DMatrix::from_fn(d, d, |i, j| stiffness[i][j]);
                                ChainElement::VirtualSpring(SpringElement { axes, stiffness })
                            }
                            ElementSpec::PassiveRevolute { axis } => {
                                ChainElement::PassiveRevolute {
                                    axis: Vector3::new(axis[0], axis[1], axis[2]),
                                }
                            }
                            ElementSpec::PassivePrismatic { axis } => {
                                ChainElement::PassivePrismatic {
                                    axis: Vector3::new(axis[0], axis[1], axis[2]),
                                }
                            }
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(BuiltLeg {
                    chain: ChainModel::new(base, elements)?,
                    lever: leg
                        .lever_v
                        .map(|l| Vector3::new(l[0], l[1], l[2]))
                        .unwrap_or_else(Vector3::zeros),
                    orientation: leg
                        .orientation_r
                        .map(|r| Matrix3::from_fn(|i, j| r[i][j]))
                        .unwrap_or_else(Matrix3::identity),
                })
            })
            .collect()
    }
}

/// One leg ready for stiffness computation.
#[derive(Debug, Clone)]
pub struct BuiltLeg {
    pub chain: ChainModel,
    pub lever: Vector3<f64>,
    pub orientation: Matrix3<f64>,
}
