//! JSON documents of named definitions and their resolution into live objects.
//!
//! A document lists graphs, groupoids, functors, natural transformations,
//! spans, bibundles, homotopy witnesses and configs. Definitions refer to
//! each other by name; names are unique across the whole document.
//! Printing goes through `serde_json::Value`, so keys come out sorted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bibundle::{
    compose_bibundles, gamma, gamma_inv, inverse_bibundle, strict_bibundle, unit_bibundle, Bibundle,
};
use crate::builtins;
use crate::fractions::{HomotopyWitness, TruncationConfig};
use crate::graph::{Cell, EdgePath, Graph};
use crate::groupoid::{Functor, GraphGroupoid, NatTrans};
use crate::homotopy::{Word, WordEqConfig};
use crate::span::{compose_spans, identity_span, GeneralizedMap, LegClass};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema violation at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{from}` references unknown {kind} `{name}`")]
    UnknownReference { from: String, kind: &'static str, name: String },
    #[error("reference cycle through `{0}`")]
    Cycle(String),
    #[error("`{name}` is invalid: {reason}")]
    Invalid { name: String, reason: String },
}

fn invalid(name: &str, e: impl fmt::Display) -> IoError {
    IoError::Invalid { name: name.to_string(), reason: e.to_string() }
}

/// Rejects repeated keys, which `BTreeMap`'s own impl silently overwrites.
fn unique<'de, D, V>(d: D) -> Result<BTreeMap<String, V>, D::Error>
where
    D: Deserializer<'de>,
    V: Deserialize<'de>,
{
    struct Unique<V>(PhantomData<V>);
    impl<'de, V: Deserialize<'de>> Visitor<'de> for Unique<V> {
        type Value = BTreeMap<String, V>;
        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a map with unique keys")
        }
        fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = m.next_entry::<String, V>()? {
                if out.contains_key(&k) {
                    return Err(de::Error::custom(format!("duplicate name `{k}`")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }
    d.deserialize_map(Unique(PhantomData))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: u32,
    #[serde(default, deserialize_with = "unique")]
    pub graphs: BTreeMap<String, GraphDef>,
    #[serde(default, deserialize_with = "unique")]
    pub groupoids: BTreeMap<String, GroupoidDef>,
    #[serde(default, deserialize_with = "unique")]
    pub functors: BTreeMap<String, FunctorDef>,
    #[serde(default, deserialize_with = "unique")]
    pub nat_transes: BTreeMap<String, NatTransDef>,
    #[serde(default, deserialize_with = "unique")]
    pub spans: BTreeMap<String, SpanDef>,
    #[serde(default, deserialize_with = "unique")]
    pub bibundles: BTreeMap<String, BibundleDef>,
    #[serde(default, deserialize_with = "unique")]
    pub witnesses: BTreeMap<String, WitnessDef>,
    #[serde(default, deserialize_with = "unique")]
    pub configs: BTreeMap<String, ConfigDef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDef {
    pub vertices: Vec<String>,
    /// `[name, tail, head]`.
    #[serde(default)]
    pub edges: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<FaceDef>,
}

/// A closed path: start vertex and oriented edges (`e` or `~e`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDef {
    pub start: String,
    pub steps: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupoidDef {
    /// Edgeless groupoid: arrows `[name, source, target]`, composition
    /// triples `[h, g, h∘g]` for every composable pair.
    Finite {
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        compose: Vec<(String, String, String)>,
    },
    Pair {
        objects: Vec<String>,
    },
    Unit {
        graph: String,
    },
    /// Left action of a finite group on a graph; `act[element][cell]` lists
    /// moved cells only.
    Action {
        group: String,
        space: String,
        act: BTreeMap<String, BTreeMap<String, String>>,
    },
}

/// Images of every vertex and forward edge, by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDef {
    pub source: String,
    pub target: String,
    pub objects: BTreeMap<String, String>,
    pub arrows: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NatTransDef {
    pub from: String,
    pub to: String,
    /// Object-graph cell to arrow-graph cell.
    pub components: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanClass {
    #[default]
    E,
    W,
}

impl SpanClass {
    fn is_e(&self) -> bool {
        *self == SpanClass::E
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpanDef {
    Legs {
        left: String,
        right: String,
        #[serde(default, skip_serializing_if = "SpanClass::is_e")]
        class: SpanClass,
    },
    Strict {
        functor: String,
    },
    Identity {
        groupoid: String,
    },
    Gamma {
        bibundle: String,
    },
    /// `second ∘ first`.
    Compose {
        first: String,
        second: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BibundleDef {
    Strict { functor: String },
    Unit { groupoid: String },
    Inverse { of: String },
    GammaInv { span: String },
    Compose { first: String, second: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessDef {
    /// `a(x)` as a word from `φ(x)` to `ψ(x)`, e.g. `[tau]` or `a.~b`.
    Homotopy { from: String, to: String, components: BTreeMap<String, String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDef {
    pub depth: usize,
    pub max_words: usize,
    pub max_len: usize,
}

impl Default for ConfigDef {
    fn default() -> Self {
        let t = TruncationConfig::default();
        ConfigDef { depth: t.word.depth, max_words: t.word.max_words, max_len: t.max_len }
    }
}

impl From<ConfigDef> for TruncationConfig {
    fn from(c: ConfigDef) -> Self {
        TruncationConfig { max_len: c.max_len, word: WordEqConfig { depth: c.depth, max_words: c.max_words } }
    }
}

impl Document {
    pub fn names(&self) -> Vec<(&'static str, &str)> {
        let mut out: Vec<(&'static str, &str)> = Vec::new();
        out.extend(self.graphs.keys().map(|k| ("graph", k.as_str())));
        out.extend(self.groupoids.keys().map(|k| ("groupoid", k.as_str())));
        out.extend(self.functors.keys().map(|k| ("functor", k.as_str())));
        out.extend(self.nat_transes.keys().map(|k| ("nat_trans", k.as_str())));
        out.extend(self.spans.keys().map(|k| ("span", k.as_str())));
        out.extend(self.bibundles.keys().map(|k| ("bibundle", k.as_str())));
        out.extend(self.witnesses.keys().map(|k| ("witness", k.as_str())));
        out.extend(self.configs.keys().map(|k| ("config", k.as_str())));
        out
    }
}

pub fn parse(text: &str) -> Result<Document, IoError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => match message.strip_prefix("duplicate name `") {
                Some(rest) => IoError::Duplicate(rest.split('`').next().unwrap_or_default().to_string()),
                None => IoError::Schema { line, column, message },
            },
            _ => IoError::Syntax { line, column, message },
        }
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(IoError::Version(doc.schema_version));
    }
    let mut seen = BTreeSet::new();
    for (_, n) in doc.names() {
        if !seen.insert(n) {
            return Err(IoError::Duplicate(n.to_string()));
        }
    }
    Ok(doc)
}

/// Any serializable value as pretty JSON with sorted keys.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("plain data serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("values print");
    s.push('\n');
    s
}

pub fn print(doc: &Document) -> String {
    to_json(doc)
}

/// Live objects built from a document.
#[derive(Clone, Default)]
pub struct Library {
    pub graphs: BTreeMap<String, Arc<Graph>>,
    pub groupoids: BTreeMap<String, Arc<GraphGroupoid>>,
    pub functors: BTreeMap<String, Functor>,
    pub nat_transes: BTreeMap<String, NatTrans>,
    pub spans: BTreeMap<String, GeneralizedMap>,
    pub bibundles: BTreeMap<String, Bibundle>,
    pub witnesses: BTreeMap<String, HomotopyWitness>,
    pub configs: BTreeMap<String, TruncationConfig>,
}

impl fmt::Debug for Library {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Library")
            .field("graphs", &self.graphs.keys().collect::<Vec<_>>())
            .field("groupoids", &self.groupoids.keys().collect::<Vec<_>>())
            .field("functors", &self.functors.keys().collect::<Vec<_>>())
            .field("spans", &self.spans.keys().collect::<Vec<_>>())
            .field("bibundles", &self.bibundles.keys().collect::<Vec<_>>())
            .finish()
    }
}

macro_rules! getter {
    ($fn:ident, $field:ident, $ty:ty, $kind:literal) => {
        pub fn $fn(&self, from: &str, name: &str) -> Result<$ty, IoError> {
            self.$field.get(name).cloned().ok_or_else(|| IoError::UnknownReference {
                from: from.to_string(),
                kind: $kind,
                name: name.to_string(),
            })
        }
    };
}

impl Library {
    getter!(graph, graphs, Arc<Graph>, "graph");
    getter!(groupoid, groupoids, Arc<GraphGroupoid>, "groupoid");
    getter!(functor, functors, Functor, "functor");
    getter!(nat_trans, nat_transes, NatTrans, "nat_trans");
    getter!(span, spans, GeneralizedMap, "span");
    getter!(bibundle, bibundles, Bibundle, "bibundle");
    getter!(witness, witnesses, HomotopyWitness, "witness");
    getter!(config, configs, TruncationConfig, "config");
}

fn cell(g: &Graph, owner: &str, s: &str) -> Result<Cell, IoError> {
    g.parse_cell(s).map_err(|e| invalid(owner, e))
}

/// Total cell map from a name table; reversed edges map to reversed images.
fn cell_table(
    owner: &str,
    src: &Graph,
    dst: &Graph,
    table: &BTreeMap<String, String>,
) -> Result<HashMap<Cell, Cell>, IoError> {
    let mut out = HashMap::new();
    for (k, v) in table {
        out.insert(cell(src, owner, k)?, cell(dst, owner, v)?);
    }
    for c in src.cells() {
        if !out.contains_key(&c) {
            return Err(invalid(owner, format!("no image for `{}`", src.cell_name(c))));
        }
    }
    Ok(out)
}

fn lookup(m: &HashMap<Cell, Cell>, c: Cell) -> Option<Cell> {
    match c {
        Cell::E(e, false) => m.get(&Cell::E(e, true)).map(|d| d.reversed()),
        _ => m.get(&c).copied(),
    }
}

fn build_graph(name: &str, d: &GraphDef) -> Result<Graph, IoError> {
    let g = Graph::new(d.vertices.clone(), d.edges.clone()).map_err(|e| invalid(name, e))?;
    let mut faces = Vec::new();
    for f in &d.faces {
        let start = g.vertex(&f.start).map_err(|e| invalid(name, e))?;
        let mut steps = Vec::new();
        for s in &f.steps {
            match cell(&g, name, s)? {
                Cell::E(e, fwd) => steps.push((e, fwd)),
                Cell::V(_) => return Err(invalid(name, format!("face step `{s}` is a vertex"))),
            }
        }
        faces.push(EdgePath { start, steps });
    }
    g.with_faces(faces).map_err(|e| invalid(name, e))
}

#[derive(Default)]
struct Resolver<'a> {
    doc: Option<&'a Document>,
    lib: Library,
    busy: BTreeSet<String>,
}

impl<'a> Resolver<'a> {
    fn doc(&self) -> &'a Document {
        self.doc.expect("resolver has a document")
    }

    fn enter(&mut self, name: &str) -> Result<(), IoError> {
        if !self.busy.insert(name.to_string()) {
            return Err(IoError::Cycle(name.to_string()));
        }
        Ok(())
    }

    fn unknown(from: &str, kind: &'static str, name: &str) -> IoError {
        IoError::UnknownReference { from: from.to_string(), kind, name: name.to_string() }
    }

    fn groupoid(&mut self, from: &str, name: &str) -> Result<Arc<GraphGroupoid>, IoError> {
        if let Some(g) = self.lib.groupoids.get(name) {
            return Ok(g.clone());
        }
        let d = self.doc().groupoids.get(name).ok_or_else(|| Self::unknown(from, "groupoid", name))?;
        self.enter(name)?;
        let g = match d {
            GroupoidDef::Finite { objects, arrows, compose } => {
                let idx: HashMap<&str, usize> = arrows.iter().enumerate().map(|(i, a)| (a.0.as_str(), i)).collect();
                let arrow = |s: &str| idx.get(s).copied().ok_or_else(|| invalid(name, format!("unknown arrow `{s}`")));
                let mut table = HashMap::new();
                for (h, g, hg) in compose {
                    table.insert((arrow(h)?, arrow(g)?), arrow(hg)?);
                }
                for (i, h) in arrows.iter().enumerate() {
                    for (j, g) in arrows.iter().enumerate() {
                        if h.1 == g.2 && !table.contains_key(&(i, j)) {
                            return Err(invalid(name, format!("no composite for `{}`∘`{}`", h.0, g.0)));
                        }
                    }
                }
                let objs: Vec<&str> = objects.iter().map(String::as_str).collect();
                let arrs: Vec<(&str, &str, &str)> =
                    arrows.iter().map(|a| (a.0.as_str(), a.1.as_str(), a.2.as_str())).collect();
                GraphGroupoid::edgeless(name, &objs, &arrs, |h, g| table[&(h, g)]).map_err(|e| invalid(name, e))?
            }
            GroupoidDef::Pair { objects } => {
                let objs: Vec<&str> = objects.iter().map(String::as_str).collect();
                if objs.iter().collect::<BTreeSet<_>>().len() != objs.len() {
                    return Err(invalid(name, "repeated object"));
                }
                GraphGroupoid::pair_groupoid(name, &objs)
            }
            GroupoidDef::Unit { graph } => {
                let x = self.lib.graph(name, graph)?;
                GraphGroupoid::unit_groupoid(name, x)
            }
            GroupoidDef::Action { group, space, act } => {
                let grp = self.groupoid(name, group)?;
                let x = self.lib.graph(name, space)?;
                let mut moves: Vec<HashMap<Cell, Cell>> = vec![HashMap::new(); grp.arrow_count()];
                for (el, table) in act {
                    let h = grp.arrow(el).map_err(|e| invalid(name, e))?;
                    for (k, v) in table {
                        moves[h].insert(cell(&x, name, k)?, cell(&x, name, v)?);
                    }
                }
                GraphGroupoid::group_action(name, &grp, x, |h, c| lookup(&moves[h], c).unwrap_or(c))
                    .map_err(|e| invalid(name, e))?
            }
        };
        self.busy.remove(name);
        let g = Arc::new(g);
        self.lib.groupoids.insert(name.to_string(), g.clone());
        Ok(g)
    }

    fn functor(&self, name: &str, d: &FunctorDef) -> Result<Functor, IoError> {
        let (k, g) = (self.lib.groupoid(name, &d.source)?, self.lib.groupoid(name, &d.target)?);
        let f0 = cell_table(name, &k.g0, &g.g0, &d.objects)?;
        let f1 = cell_table(name, &k.g1, &g.g1, &d.arrows)?;
        Functor::from_fns(name, k, g, |c| lookup(&f0, c), |c| lookup(&f1, c)).map_err(|e| invalid(name, e))
    }

    fn span(&mut self, from: &str, name: &str) -> Result<GeneralizedMap, IoError> {
        if let Some(s) = self.lib.spans.get(name) {
            return Ok(s.clone());
        }
        let d = self.doc().spans.get(name).ok_or_else(|| Self::unknown(from, "span", name))?;
        self.enter(name)?;
        let mut s = match d {
            SpanDef::Legs { left, right, class } => {
                let (l, r) = (self.lib.functor(name, left)?, self.lib.functor(name, right)?);
                match class {
                    SpanClass::E => GeneralizedMap::new(name, l, r),
                    SpanClass::W => GeneralizedMap::unchecked(name, l, r, LegClass::W),
                }
                .map_err(|e| invalid(name, e))?
            }
            SpanDef::Strict { functor } => GeneralizedMap::strict(&self.lib.functor(name, functor)?),
            SpanDef::Identity { groupoid } => identity_span(&self.lib.groupoid(name, groupoid)?),
            SpanDef::Gamma { bibundle } => {
                let b = self.bibundle(name, bibundle)?;
                gamma(&b).map_err(|e| invalid(name, e))?
            }
            SpanDef::Compose { first, second } => {
                let (f, g) = (self.span(name, first)?, self.span(name, second)?);
                compose_spans(&f, &g).map_err(|e| invalid(name, e))?
            }
        };
        self.busy.remove(name);
        s.name = name.to_string();
        self.lib.spans.insert(name.to_string(), s.clone());
        Ok(s)
    }

    fn bibundle(&mut self, from: &str, name: &str) -> Result<Bibundle, IoError> {
        if let Some(b) = self.lib.bibundles.get(name) {
            return Ok(b.clone());
        }
        let d = self.doc().bibundles.get(name).ok_or_else(|| Self::unknown(from, "bibundle", name))?;
        self.enter(name)?;
        let mut b = match d {
            BibundleDef::Strict { functor } => strict_bibundle(&self.lib.functor(name, functor)?),
            BibundleDef::Unit { groupoid } => Ok(unit_bibundle(&self.lib.groupoid(name, groupoid)?)),
            BibundleDef::Inverse { of } => inverse_bibundle(&self.bibundle(name, of)?),
            BibundleDef::GammaInv { span } => gamma_inv(&self.span(name, span)?),
            BibundleDef::Compose { first, second } => {
                let (f, g) = (self.bibundle(name, first)?, self.bibundle(name, second)?);
                compose_bibundles(&f, &g)
            }
        }
        .map_err(|e| invalid(name, e))?;
        self.busy.remove(name);
        b.name = name.to_string();
        self.lib.bibundles.insert(name.to_string(), b.clone());
        Ok(b)
    }
}

/// Builds every definition, failing on the first bad one.
pub fn resolve(doc: &Document) -> Result<Library, IoError> {
    let mut r = Resolver { doc: Some(doc), ..Resolver::default() };
    for (name, d) in &doc.graphs {
        r.lib.graphs.insert(name.clone(), Arc::new(build_graph(name, d)?));
    }
    for name in doc.groupoids.keys() {
        r.groupoid(name, name)?;
    }
    for (name, d) in &doc.functors {
        let f = r.functor(name, d)?;
        r.lib.functors.insert(name.clone(), f);
    }
    for (name, d) in &doc.nat_transes {
        let (phi, psi) = (r.lib.functor(name, &d.from)?, r.lib.functor(name, &d.to)?);
        let t = cell_table(name, &phi.source.g0, &phi.target.g1, &d.components)?;
        let nt = NatTrans::from_fn(phi, psi, |c| lookup(&t, c)).map_err(|e| invalid(name, e))?;
        r.lib.nat_transes.insert(name.clone(), nt);
    }
    for name in doc.spans.keys() {
        r.span(name, name)?;
    }
    for name in doc.bibundles.keys() {
        r.bibundle(name, name)?;
    }
    for (name, d) in &doc.witnesses {
        let WitnessDef::Homotopy { from, to, components } = d;
        let (phi, psi) = (r.lib.functor(name, from)?, r.lib.functor(name, to)?);
        let k = phi.source.clone();
        let mut a = vec![None; k.object_count()];
        for (obj, text) in components {
            let x = k.object(obj).map_err(|e| invalid(name, e))?;
            let w = Word::parse(&phi.target, phi.f0.vertex_image(x), text).map_err(|e| invalid(name, e))?;
            a[x] = Some(w);
        }
        let a = a
            .into_iter()
            .enumerate()
            .map(|(x, w)| w.ok_or_else(|| invalid(name, format!("no component at `{}`", k.object_name(x)))))
            .collect::<Result<Vec<_>, _>>()?;
        r.lib.witnesses.insert(name.clone(), HomotopyWitness { from: phi, to: psi, a });
    }
    for (name, d) in &doc.configs {
        r.lib.configs.insert(name.clone(), (*d).into());
    }
    Ok(r.lib)
}

/// The definition of an existing functor, naming every vertex and forward edge.
pub fn functor_def(f: &Functor) -> FunctorDef {
    let table = |src: &Graph, dst: &Graph, apply: &dyn Fn(Cell) -> Cell| -> BTreeMap<String, String> {
        src.cells().map(|c| (src.cell_name(c), dst.cell_name(apply(c)))).collect()
    };
    FunctorDef {
        source: f.source.name.clone(),
        target: f.target.name.clone(),
        objects: table(&f.source.g0, &f.target.g0, &|c| f.ob(c)),
        arrows: table(&f.source.g1, &f.target.g1, &|c| f.ar(c)),
    }
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn triples(xs: &[(&str, &str, &str)]) -> Vec<(String, String, String)> {
    xs.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect()
}

fn moves(xs: &[(&str, &str)]) -> BTreeMap<String, String> {
    xs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn graph_def(g: &Graph) -> GraphDef {
    GraphDef {
        vertices: g.vertex_names().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| (e.name.clone(), g.vertex_name(e.tail).to_string(), g.vertex_name(e.head).to_string()))
            .collect(),
        faces: Vec::new(),
    }
}

/// The built-in corpus as a document.
pub fn builtin_examples() -> Document {
    let mut d = Document { schema_version: SCHEMA_VERSION, ..Document::default() };
    d.graphs.insert("P3".into(), graph_def(&builtins::path3()));
    d.graphs.insert("C3".into(), graph_def(&Graph::cycle(3, "v", "e")));
    d.graphs.insert("C6".into(), graph_def(&Graph::cycle(6, "r", "f")));

    let g = &mut d.groupoids;
    g.insert(
        "PT2".into(),
        GroupoidDef::Finite {
            objects: strs(&["star"]),
            arrows: triples(&[("1", "star", "star"), ("tau", "star", "star")]),
            compose: triples(&[("1", "1", "1"), ("1", "tau", "tau"), ("tau", "1", "tau"), ("tau", "tau", "1")]),
        },
    );
    g.insert(
        "ONE".into(),
        GroupoidDef::Finite {
            objects: strs(&["pt"]),
            arrows: triples(&[("1", "pt", "pt")]),
            compose: triples(&[("1", "1", "1")]),
        },
    );
    g.insert("PAIR2".into(), GroupoidDef::Pair { objects: strs(&["a", "b"]) });
    g.insert("UC3".into(), GroupoidDef::Unit { graph: "C3".into() });
    g.insert(
        "REFL".into(),
        GroupoidDef::Action {
            group: "PT2".into(),
            space: "P3".into(),
            act: BTreeMap::from([("tau".into(), moves(&[("-1", "1"), ("1", "-1"), ("a", "~b"), ("b", "~a")]))]),
        },
    );
    let shift: Vec<(String, String)> = (0..6)
        .flat_map(|i| [(format!("r{i}"), format!("r{}", (i + 3) % 6)), (format!("f{i}"), format!("f{}", (i + 3) % 6))])
        .collect();
    g.insert(
        "ROT".into(),
        GroupoidDef::Action {
            group: "PT2".into(),
            space: "C6".into(),
            act: BTreeMap::from([("tau".into(), shift.into_iter().collect())]),
        },
    );

    for (name, f) in builtins::corpus().functors {
        d.functors.insert(name, functor_def(&f));
    }

    d.nat_transes.insert(
        "tau-twist".into(),
        NatTransDef { from: "id_PT2".into(), to: "id_PT2".into(), components: moves(&[("star", "tau")]) },
    );

    for f in ["q", "c", "i", "collapse", "incl_a"] {
        d.spans.insert(format!("strict-{f}"), SpanDef::Strict { functor: f.into() });
    }
    d.spans.insert("morita-q".into(), SpanDef::Legs { left: "q".into(), right: "id_ROT".into(), class: SpanClass::E });
    d.spans.insert("c-span".into(), SpanDef::Legs { left: "c".into(), right: "id_REFL".into(), class: SpanClass::W });
    d.spans.insert("id-PT2".into(), SpanDef::Identity { groupoid: "PT2".into() });
    d.spans.insert("gamma-double-cover".into(), SpanDef::Gamma { bibundle: "double-cover".into() });
    d.spans.insert(
        "q-then-collapse".into(),
        SpanDef::Compose { first: "strict-q".into(), second: "strict-collapse".into() },
    );

    d.bibundles.insert("double-cover".into(), BibundleDef::Strict { functor: "q".into() });
    d.bibundles.insert("inv-double-cover".into(), BibundleDef::Inverse { of: "double-cover".into() });
    d.bibundles.insert("unit-REFL".into(), BibundleDef::Unit { groupoid: "REFL".into() });
    d.bibundles.insert("bundle-c".into(), BibundleDef::Strict { functor: "c".into() });
    d.bibundles.insert("gamma-inv-morita-q".into(), BibundleDef::GammaInv { span: "morita-q".into() });

    d.witnesses.insert(
        "tau-central".into(),
        WitnessDef::Homotopy { from: "id_PT2".into(), to: "id_PT2".into(), components: moves(&[("star", "[tau]")]) },
    );
    d.witnesses.insert(
        "tau-to-collapse".into(),
        WitnessDef::Homotopy {
            from: "id_PT2".into(),
            to: "trivial_PT2".into(),
            components: moves(&[("star", "[tau]")]),
        },
    );
    d.functors.insert(
        "trivial_PT2".into(),
        FunctorDef {
            source: "PT2".into(),
            target: "PT2".into(),
            objects: moves(&[("star", "star")]),
            arrows: moves(&[("1", "1"), ("tau", "1")]),
        },
    );
    d.configs.insert("default".into(), ConfigDef::default());
    d
}
