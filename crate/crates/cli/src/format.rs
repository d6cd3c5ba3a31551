//! On-disk system descriptions.
//!
//! A system file is a JSON object:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "kind": "annihilation",
//!   "dimensions": { "modes": 1, "fields": 1 },
//!   "matrices": {
//!     "F": [[[-1.0, 0.0]]],
//!     "G": [[[-1.4142135623730951, 0.0]]],
//!     "H": [[[1.4142135623730951, 0.0]]],
//!     "K": [[[1.0, 0.0]]]
//!   },
//!   "metadata": { "label": "single-mode cavity" }
//! }
//! ```
//!
//! Matrices are arrays of rows and every entry is a `[re, im]` pair.
//! `kind` is one of `general`, `annihilation`, `plant` or `controller`;
//! plants and controllers carry a `structure` (`general` or
//! `annihilation`, default `annihilation`) and their dimensions count modes
//! and fields, so doubled-up matrices are twice as large. Plants may add a
//! `cost` block (`C`, `D`, optional `E`) and a physical output `selector`.
//! A controller without noise matrices (`G_cw`, `K_cw`, `K_cy`) is a
//! synthesis triple and may carry a commutation matrix `Theta`.
//!
//! Numbers are written in shortest round-trip form, so write-then-read is
//! bit-identical for every finite `f64`.

use std::fmt::Write as _;
use std::path::Path;

use qlinear::feedback::{ControllerModel, CostOutput, PlantModel};
use qlinear::qsys::{AnnihilationQSys, GeneralQSys, QSys, SystemKind};
use qlinear::{CMat, Cx};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

/// A file that could not be read, parsed or validated.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{source_name}: {location}: {message}")]
pub struct InputError {
    pub source_name: String,
    /// Dotted path into the document, or `line L, column C` for syntax
    /// errors.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    System(QSys),
    Plant(PlantFile),
    Controller(ControllerFile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantFile {
    pub plant: PlantModel,
    /// Rows select physical outputs out of `[Y; Ỹ]`.
    pub selector: Option<CMat>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerFile {
    Full(ControllerModel),
    /// `(F_c, G_cy, H_c)` awaiting noise synthesis.
    Triple {
        structure: SystemKind,
        f_c: CMat,
        g_cy: CMat,
        h_c: CMat,
        theta: Option<CMat>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemFile {
    pub model: Model,
    /// Free-form; `label` and `seed` are conventional.
    pub metadata: Map<String, Value>,
}

impl SystemFile {
    pub fn new(model: Model) -> Self {
        Self { model, metadata: Map::new() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.metadata.insert("label".into(), Value::String(label.into()));
        self
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.model {
            Model::System(q) => q.kind().as_str(),
            Model::Plant(_) => "plant",
            Model::Controller(_) => "controller",
        }
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| InputError {
            source_name: name.clone(),
            location: "file".into(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &name)
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self, InputError> {
        let value: Value = serde_json::from_str(text).map_err(|e| InputError {
            source_name: source_name.into(),
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Reader { source_name }.file(&value)
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("schema_version".into(), SCHEMA_VERSION.into());
        top.insert("kind".into(), self.kind_name().into());
        let mut mats = Map::new();
        let mut put = |name: &str, m: &CMat| {
            mats.insert(name.into(), encode_matrix(m));
        };
        let dims: Value = match &self.model {
            Model::System(q) => {
                let (f, g, h, k) = q.matrices();
                put("F", f);
                put("G", g);
                put("H", h);
                put("K", k);
                serde_json::json!({ "modes": q.modes(), "fields": q.fields() })
            }
            Model::Plant(pf) => {
                let p = &pf.plant;
                top.insert("structure".into(), p.kind.as_str().into());
                put("F", &p.f);
                put("G_w", &p.g_w);
                put("G_u", &p.g_u);
                put("H", &p.h);
                put("K", &p.k);
                let d = p.dims();
                serde_json::json!({ "states": d.n, "noise": d.m_w, "inputs": d.m_u, "outputs": d.m_y })
            }
            Model::Controller(ControllerFile::Full(c)) => {
                top.insert("structure".into(), c.kind.as_str().into());
                put("F_c", &c.f_c);
                put("G_cw", &c.g_cw);
                put("G_cy", &c.g_cy);
                put("H_c", &c.h_c);
                put("K_cw", &c.k_cw);
                put("K_cy", &c.k_cy);
                let d = c.dims();
                serde_json::json!({ "states": d.n_c, "noise": d.m_wt, "inputs": d.m_y, "outputs": d.m_u })
            }
            Model::Controller(ControllerFile::Triple { structure, f_c, g_cy, h_c, theta }) => {
                top.insert("structure".into(), structure.as_str().into());
                put("F_c", f_c);
                put("G_cy", g_cy);
                put("H_c", h_c);
                if let Some(t) = theta {
                    put("Theta", t);
                }
                let w = structure.width();
                serde_json::json!({ "states": f_c.nrows() / w, "inputs": g_cy.ncols() / w, "outputs": h_c.nrows() / w })
            }
        };
        top.insert("dimensions".into(), dims);
        top.insert("matrices".into(), Value::Object(mats));
        if let Model::Plant(pf) = &self.model {
            if let Some(cost) = &pf.plant.cost {
                let mut c = Map::new();
                c.insert("C".into(), encode_matrix(&cost.c));
                c.insert("D".into(), encode_matrix(&cost.d));
                if let Some(e) = &cost.e {
                    c.insert("E".into(), encode_matrix(e));
                }
                top.insert("cost".into(), Value::Object(c));
            }
            if let Some(l) = &pf.selector {
                top.insert("selector".into(), encode_matrix(l));
            }
        }
        if !self.metadata.is_empty() {
            top.insert("metadata".into(), Value::Object(self.metadata.clone()));
        }
        Value::Object(top)
    }

    /// Pretty JSON with one matrix row per line.
    pub fn to_json(&self) -> String {
        to_pretty(&self.to_value())
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// `[[ [re, im], ... ], ...]`.
pub fn encode_matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| encode_entry(m[(i, j)])).collect())).collect(),
    )
}

fn encode_entry(z: Cx) -> Value {
    let num = |x: f64| serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
    Value::Array(vec![num(z.re), num(z.im)])
}

fn depth(v: &Value) -> usize {
    match v {
        Value::Array(items) => 1 + items.iter().map(depth).max().unwrap_or(0),
        Value::Object(_) => usize::MAX / 2,
        _ => 0,
    }
}

/// Pretty-prints `v`, keeping arrays of depth at most two (matrix rows,
/// entries) on one line.
pub fn to_pretty(v: &Value) -> String {
    let mut out = String::new();
    write_pretty(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_pretty(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_pretty(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
        Value::Array(items) if depth(v) > 2 && !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_pretty(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_pretty(out, item, indent);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

struct Reader<'a> {
    source_name: &'a str,
}

const SYSTEM_MATRICES: [&str; 4] = ["F", "G", "H", "K"];
const PLANT_MATRICES: [&str; 5] = ["F", "G_w", "G_u", "H", "K"];
const CONTROLLER_MATRICES: [&str; 7] = ["F_c", "G_cw", "G_cy", "H_c", "K_cw", "K_cy", "Theta"];
const TOP_KEYS: [&str; 8] =
    ["schema_version", "kind", "structure", "dimensions", "matrices", "cost", "selector", "metadata"];

impl Reader<'_> {
    fn err(&self, location: impl Into<String>, message: impl Into<String>) -> InputError {
        InputError { source_name: self.source_name.into(), location: location.into(), message: message.into() }
    }

    fn object<'v>(&self, v: &'v Value, loc: &str) -> Result<&'v Map<String, Value>, InputError> {
        v.as_object().ok_or_else(|| self.err(loc, "expected an object"))
    }

    fn only_keys(&self, map: &Map<String, Value>, loc: &str, allowed: &[&str]) -> Result<(), InputError> {
        match map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => {
                Err(self.err(format!("{loc}{k}"), format!("unknown field (expected one of {})", allowed.join(", "))))
            }
            None => Ok(()),
        }
    }

    fn count(&self, dims: &Map<String, Value>, key: &str) -> Result<usize, InputError> {
        let loc = format!("dimensions.{key}");
        let v = dims.get(key).ok_or_else(|| self.err(&loc, "missing"))?;
        v.as_u64().map(|n| n as usize).ok_or_else(|| self.err(loc, "must be a non-negative integer"))
    }

    fn structure(&self, top: &Map<String, Value>) -> Result<SystemKind, InputError> {
        match top.get("structure") {
            None => Ok(SystemKind::Annihilation),
            Some(v) => match v.as_str() {
                Some("annihilation") => Ok(SystemKind::Annihilation),
                Some("general") => Ok(SystemKind::General),
                _ => Err(self.err("structure", "must be \"general\" or \"annihilation\"")),
            },
        }
    }

    fn file(&self, v: &Value) -> Result<SystemFile, InputError> {
        let top = self.object(v, "document")?;
        self.only_keys(top, "", &TOP_KEYS)?;
        match top.get("schema_version") {
            None => return Err(self.err("schema_version", "missing (this reader understands version 1)")),
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(self.err("schema_version", format!("unsupported version {v} (expected 1)"))),
        }
        let kind =
            top.get("kind").and_then(Value::as_str).ok_or_else(|| self.err("kind", "missing or not a string"))?;
        let dims =
            self.object(top.get("dimensions").ok_or_else(|| self.err("dimensions", "missing"))?, "dimensions")?;
        let mats = self.object(top.get("matrices").ok_or_else(|| self.err("matrices", "missing"))?, "matrices")?;
        let metadata = match top.get("metadata") {
            None => Map::new(),
            Some(m) => self.object(m, "metadata")?.clone(),
        };
        let extras_allowed = kind == "plant";
        for key in ["cost", "selector"] {
            if top.contains_key(key) && !extras_allowed {
                return Err(self.err(key, format!("only plant files may have a {key}")));
            }
        }
        if top.contains_key("structure") && !(kind == "plant" || kind == "controller") {
            return Err(self.err("structure", "only plant and controller files have a structure"));
        }
        let model = match kind {
            "general" | "annihilation" => {
                let sk = if kind == "general" { SystemKind::General } else { SystemKind::Annihilation };
                Model::System(self.system(sk, dims, mats)?)
            }
            "plant" => Model::Plant(self.plant(self.structure(top)?, top, dims, mats)?),
            "controller" => Model::Controller(self.controller(self.structure(top)?, dims, mats)?),
            other => {
                return Err(self.err(
                    "kind",
                    format!("unknown kind \"{other}\" (expected general, annihilation, plant or controller)"),
                ))
            }
        };
        Ok(SystemFile { model, metadata })
    }

    fn matrix(&self, v: &Value, loc: &str, rows: Option<usize>, cols: usize) -> Result<CMat, InputError> {
        let arr = v.as_array().ok_or_else(|| self.err(loc, "matrix must be an array of rows"))?;
        if let Some(r) = rows {
            if arr.len() != r {
                return Err(self.err(loc, format!("expected {r} rows, found {}", arr.len())));
            }
        }
        let mut m = CMat::zeros(arr.len(), cols);
        for (i, row) in arr.iter().enumerate() {
            let rloc = format!("{loc}[{i}]");
            let row = row.as_array().ok_or_else(|| self.err(&rloc, "row must be an array of entries"))?;
            if row.len() != cols {
                return Err(self.err(&rloc, format!("expected {cols} columns, found {}", row.len())));
            }
            for (j, entry) in row.iter().enumerate() {
                m[(i, j)] = self.entry(entry, &format!("{rloc}[{j}]"))?;
            }
        }
        Ok(m)
    }

    fn entry(&self, v: &Value, loc: &str) -> Result<Cx, InputError> {
        let pair = match v.as_array() {
            Some(p) if p.len() == 2 => p,
            _ => return Err(self.err(loc, "entry must be [re, im]")),
        };
        let part = |x: &Value| x.as_f64().filter(|f| f.is_finite());
        match (part(&pair[0]), part(&pair[1])) {
            (Some(re), Some(im)) => Ok(Cx::new(re, im)),
            _ => Err(self.err(loc, "entry must be [re, im] with finite numbers")),
        }
    }

    fn named(&self, mats: &Map<String, Value>, name: &str, rows: usize, cols: usize) -> Result<CMat, InputError> {
        let v = mats.get(name).ok_or_else(|| self.err(format!("matrices.{name}"), "missing"))?;
        self.matrix(v, &format!("matrices.{name}"), Some(rows), cols)
    }

    fn model_error(&self, loc: &str, e: qlinear::Error) -> InputError {
        self.err(loc, e.to_string())
    }

    fn system(
        &self,
        kind: SystemKind,
        dims: &Map<String, Value>,
        mats: &Map<String, Value>,
    ) -> Result<QSys, InputError> {
        self.only_keys(dims, "dimensions.", &["modes", "fields"])?;
        self.only_keys(mats, "matrices.", &SYSTEM_MATRICES)?;
        let w = kind.width();
        let (n, m) = (w * self.count(dims, "modes")?, w * self.count(dims, "fields")?);
        let f = self.named(mats, "F", n, n)?;
        let g = self.named(mats, "G", n, m)?;
        let h = self.named(mats, "H", m, n)?;
        let k = self.named(mats, "K", m, m)?;
        match kind {
            SystemKind::General => GeneralQSys::from_matrices(f, g, h, k).map(QSys::General),
            SystemKind::Annihilation => AnnihilationQSys::new(f, g, h, k).map(QSys::Annihilation),
        }
        .map_err(|e| self.model_error("matrices", e))
    }

    fn plant(
        &self,
        kind: SystemKind,
        top: &Map<String, Value>,
        dims: &Map<String, Value>,
        mats: &Map<String, Value>,
    ) -> Result<PlantFile, InputError> {
        self.only_keys(dims, "dimensions.", &["states", "noise", "inputs", "outputs"])?;
        self.only_keys(mats, "matrices.", &PLANT_MATRICES)?;
        let w = kind.width();
        let n = w * self.count(dims, "states")?;
        let mw = w * self.count(dims, "noise")?;
        let mu = w * self.count(dims, "inputs")?;
        let my = w * self.count(dims, "outputs")?;
        let f = self.named(mats, "F", n, n)?;
        let g_w = self.named(mats, "G_w", n, mw)?;
        let g_u = self.named(mats, "G_u", n, mu)?;
        let h = self.named(mats, "H", my, n)?;
        let k = self.named(mats, "K", my, mw)?;
        let mut plant = PlantModel::new(kind, f, g_w, g_u, h, k).map_err(|e| self.model_error("matrices", e))?;
        if let Some(cost) = top.get("cost") {
            let c = self.object(cost, "cost")?;
            self.only_keys(c, "cost.", &["C", "D", "E"])?;
            let cm = self.matrix(c.get("C").ok_or_else(|| self.err("cost.C", "missing"))?, "cost.C", None, n)?;
            let p = cm.nrows();
            let dm = self.matrix(c.get("D").ok_or_else(|| self.err("cost.D", "missing"))?, "cost.D", Some(p), mu)?;
            let e = c.get("E").map(|e| self.matrix(e, "cost.E", Some(p), mw)).transpose()?;
            plant = plant.with_cost(CostOutput { c: cm, d: dm, e }).map_err(|e| self.model_error("cost", e))?;
        }
        let selector = top.get("selector").map(|l| self.matrix(l, "selector", None, my + mu)).transpose()?;
        if let Some(l) = &selector {
            qlinear::feedback::check_selector(l).map_err(|e| self.model_error("selector", e))?;
        }
        Ok(PlantFile { plant, selector })
    }

    fn controller(
        &self,
        kind: SystemKind,
        dims: &Map<String, Value>,
        mats: &Map<String, Value>,
    ) -> Result<ControllerFile, InputError> {
        self.only_keys(dims, "dimensions.", &["states", "noise", "inputs", "outputs"])?;
        self.only_keys(mats, "matrices.", &CONTROLLER_MATRICES)?;
        let w = kind.width();
        let n = w * self.count(dims, "states")?;
        let my = w * self.count(dims, "inputs")?;
        let mu = w * self.count(dims, "outputs")?;
        let noise_keys = ["G_cw", "K_cw", "K_cy"];
        let present = noise_keys.iter().filter(|k| mats.contains_key(**k)).count();
        let f_c = self.named(mats, "F_c", n, n)?;
        let g_cy = self.named(mats, "G_cy", n, my)?;
        let h_c = self.named(mats, "H_c", mu, n)?;
        if present == 0 {
            if dims.contains_key("noise") {
                return Err(self.err("dimensions.noise", "a controller triple has no noise inputs"));
            }
            let theta = mats.get("Theta").map(|t| self.matrix(t, "matrices.Theta", Some(n), n)).transpose()?;
            return Ok(ControllerFile::Triple { structure: kind, f_c, g_cy, h_c, theta });
        }
        if present < noise_keys.len() {
            let missing = noise_keys.iter().find(|k| !mats.contains_key(**k)).expect("some key missing");
            return Err(self.err(
                format!("matrices.{missing}"),
                "missing (a controller needs all of G_cw, K_cw, K_cy, or none for a synthesis triple)",
            ));
        }
        if mats.contains_key("Theta") {
            return Err(self.err("matrices.Theta", "only a synthesis triple may carry Theta"));
        }
        let mwt = w * self.count(dims, "noise")?;
        let g_cw = self.named(mats, "G_cw", n, mwt)?;
        let k_cw = self.named(mats, "K_cw", mu, mwt)?;
        let k_cy = self.named(mats, "K_cy", mu, my)?;
        ControllerModel::new(kind, f_c, g_cw, g_cy, h_c, k_cw, k_cy)
            .map(ControllerFile::Full)
            .map_err(|e| self.model_error("matrices", e))
    }
}
