//! Text group definitions and built-in presets.
//!
//! ```text
//! # two loxodromic generators and their inverses
//! [group]
//! name = example
//!
//! [generator a]
//! kind = moebius
//! a = 1.2,0.4
//! b = 0,1
//! c = 1,0
//! d = 1,0
//! inverse = A
//!
//! [generator A]
//! kind = moebius
//! ...
//!
//! [generator r]
//! kind = inversion
//! center = 1.5,0
//! radius = 0.5
//!
//! [rules]
//! kind = pairs          # inverses (default) | pairs | cayley
//! pairs = aA Aa rr
//!
//! [cayley]              # only with kind = cayley
//! a = a ! b             # row label, then one cell per generator; ! cancels
//!
//! [view]
//! center = 0,0
//! half = 1.5
//! ```
//!
//! Generators are numbered in the order their sections appear. A `[group]`
//! section may name a `preset` instead of listing generators; `[rules]` and
//! `[view]` then override the preset's.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::groups::{
    make_schottky_group, make_tangent_inversion_group, CancellationRules, CayleyCell, CayleyTable, Generator,
    GeneratorSet, GroupError, PairRules,
};
use crate::moebius::{Circle, Complex, MoebiusMap};
use crate::render::Viewport;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown preset '{0}' (available: {names})", names = preset_names().join(", "))]
    UnknownPreset(String),
    #[error("line {line}: {source}")]
    Group { line: usize, source: GroupError },
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct GroupConfig {
    pub name: String,
    pub generators: GeneratorSet,
    pub rules: CancellationRules,
    pub view: Option<Viewport>,
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

const PRESETS: [Preset; 2] = [
    Preset {
        name: "tangent4",
        description: "reflections in four unit circles centered at (+-sqrt2, 0) and (0, +-sqrt2); \
                      each meets the unit circle orthogonally and touches its neighbours, \
                      so the limit set is the unit circle",
    },
    Preset {
        name: "schottky2",
        description: "two loxodromic generators pairing unit circles at -2 -> 2 and -2i -> 2i; \
                      the limit set is a Cantor dust",
    },
];

pub fn presets() -> &'static [Preset] {
    &PRESETS
}

fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

fn unit_circle_at(x: f64, y: f64) -> Circle {
    Circle::new(Complex::new(x, y), 1.0).expect("unit radius")
}

pub fn preset(name: &str) -> Result<GroupConfig, ConfigError> {
    let at = |source| ConfigError::Group { line: 0, source };
    match name {
        "tangent4" => {
            let s = 2f64.sqrt();
            let gs = make_tangent_inversion_group([
                unit_circle_at(s, 0.0),
                unit_circle_at(0.0, s),
                unit_circle_at(-s, 0.0),
                unit_circle_at(0.0, -s),
            ])
            .map_err(at)?;
            Ok(GroupConfig {
                name: name.into(),
                rules: gs.presentation_rules(),
                generators: gs,
                view: Some(Viewport::new(Complex::new(0.0, 0.0), 1.1)),
            })
        }
        "schottky2" => {
            let gs = make_schottky_group(
                unit_circle_at(-2.0, 0.0),
                unit_circle_at(2.0, 0.0),
                unit_circle_at(0.0, -2.0),
                unit_circle_at(0.0, 2.0),
            )
            .map_err(at)?;
            Ok(GroupConfig {
                name: name.into(),
                rules: gs.presentation_rules(),
                generators: gs,
                view: Some(Viewport::new(Complex::new(0.0, 0.0), 3.2)),
            })
        }
        _ => Err(ConfigError::UnknownPreset(name.into())),
    }
}

/// A file path if one exists, otherwise a preset name.
pub fn load(source: &str) -> Result<GroupConfig, ConfigError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        parse_config(&text)
    } else {
        preset(source)
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Section {
    line: usize,
    kind: String,
    arg: Option<String>,
    entries: HashMap<String, Entry>,
    /// Keys in file order, for the cayley section.
    order: Vec<String>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn require(&self, key: &str) -> Result<&Entry, ConfigError> {
        self.get(key).ok_or_else(|| syntax(self.line, format!("[{}] is missing '{key}'", self.title())))
    }

    fn title(&self) -> String {
        match &self.arg {
            Some(a) => format!("{} {a}", self.kind),
            None => self.kind.clone(),
        }
    }

    fn allow(&self, keys: &[&str]) -> Result<(), ConfigError> {
        for k in &self.order {
            if !keys.contains(&k.as_str()) {
                return Err(syntax(self.entries[k].line, format!("unknown key '{k}' in [{}]", self.title())));
            }
        }
        Ok(())
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax { line, message: message.into() }
}

fn split_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unterminated section header"))?
                .trim();
            let mut parts = header.split_whitespace();
            let kind = parts.next().ok_or_else(|| syntax(line, "empty section header"))?.to_string();
            let arg = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return Err(syntax(line, format!("unexpected text in header [{header}]")));
            }
            match (kind.as_str(), &arg) {
                ("generator", Some(_)) => {}
                ("generator", None) => return Err(syntax(line, "[generator] needs a label")),
                ("group" | "rules" | "cayley" | "view", None) => {}
                (_, _) => return Err(syntax(line, format!("unknown section [{header}]"))),
            }
            if kind != "generator" && sections.iter().any(|s| s.kind == kind) {
                return Err(syntax(line, format!("duplicate section [{kind}]")));
            }
            sections.push(Section { line, kind, arg, entries: HashMap::new(), order: Vec::new() });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key = value, got '{content}'")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() {
            return Err(syntax(line, "empty key"));
        }
        let section = sections.last_mut().ok_or_else(|| syntax(line, "key outside of any section"))?;
        if section.entries.contains_key(&key) {
            return Err(syntax(line, format!("duplicate key '{key}'")));
        }
        section.order.push(key.clone());
        section.entries.insert(key, Entry { line, value });
    }
    Ok(sections)
}

fn parse_f64(e: &Entry) -> Result<f64, ConfigError> {
    let v: f64 = e.value.parse().map_err(|_| syntax(e.line, format!("not a number: '{}'", e.value)))?;
    if !v.is_finite() {
        return Err(syntax(e.line, "value must be finite"));
    }
    Ok(v)
}

/// `re,im` or a bare real.
fn parse_complex(e: &Entry) -> Result<Complex, ConfigError> {
    let bad = || syntax(e.line, format!("expected re,im but got '{}'", e.value));
    let mut parts = e.value.split(',').map(str::trim);
    let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex::new(re, im))
}

fn parse_label(line: usize, s: &str) -> Result<char, ConfigError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if !c.is_whitespace() && c != '!' => Ok(c),
        _ => Err(syntax(line, format!("generator labels are single characters, got '{s}'"))),
    }
}

fn letters_to_digits(line: usize, word: &str, gs: &GeneratorSet) -> Result<Vec<u8>, ConfigError> {
    gs.parse_word(word)
        .map(|w| w.into_digits())
        .map_err(|source| ConfigError::Group { line, source })
}

fn build_generators(sections: &[&Section]) -> Result<GeneratorSet, ConfigError> {
    let mut generators = Vec::with_capacity(sections.len());
    let mut inverse_labels = Vec::with_capacity(sections.len());
    for s in sections {
        let label = parse_label(s.line, s.arg.as_deref().unwrap_or_default())?;
        let kind = s.require("kind")?;
        match kind.value.as_str() {
            "moebius" => {
                s.allow(&["kind", "a", "b", "c", "d", "inverse"])?;
                let coef = ["a", "b", "c", "d"]
                    .map(|k| s.require(k).and_then(parse_complex));
                let [a, b, c, d] = coef;
                let map = MoebiusMap::new(a?, b?, c?, d?)
                    .map_err(|e| ConfigError::Group { line: s.line, source: e.into() })?;
                let inv = s.require("inverse")?;
                inverse_labels.push((inv.line, parse_label(inv.line, &inv.value)?));
                generators.push(Generator::moebius(map, label));
            }
            "inversion" => {
                s.allow(&["kind", "center", "radius", "inverse"])?;
                let center = parse_complex(s.require("center")?)?;
                let radius = parse_f64(s.require("radius")?)?;
                let circle = Circle::new(center, radius)
                    .map_err(|e| ConfigError::Group { line: s.line, source: e.into() })?;
                let (line, inv) = match s.get("inverse") {
                    Some(e) => (e.line, parse_label(e.line, &e.value)?),
                    None => (s.line, label),
                };
                if inv != label {
                    return Err(syntax(line, format!("inversion '{label}' must be its own inverse")));
                }
                inverse_labels.push((line, inv));
                generators.push(Generator::inversion(circle, label));
            }
            other => return Err(syntax(kind.line, format!("unknown generator kind '{other}'"))),
        }
    }
    let mut seen = HashMap::new();
    for (i, (g, s)) in generators.iter().zip(sections).enumerate() {
        if seen.insert(g.label, i).is_some() {
            return Err(syntax(s.line, format!("duplicate generator '{}'", g.label)));
        }
    }
    let inverse_index = inverse_labels
        .iter()
        .map(|&(line, l)| seen.get(&l).copied().ok_or_else(|| syntax(line, format!("unknown inverse '{l}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    let first = sections.first().map_or(0, |s| s.line);
    GeneratorSet::new(generators, inverse_index).map_err(|source| ConfigError::Group { line: first, source })
}

fn build_rules(
    rules: Option<&Section>,
    cayley: Option<&Section>,
    gs: &GeneratorSet,
    default: CancellationRules,
) -> Result<CancellationRules, ConfigError> {
    let Some(r) = rules else {
        if let Some(c) = cayley {
            return Err(syntax(c.line, "[cayley] needs [rules] kind = cayley"));
        }
        return Ok(default);
    };
    r.allow(&["kind", "pairs"])?;
    let kind = r.get("kind").map_or("inverses", |e| e.value.as_str());
    let kind_line = r.get("kind").map_or(r.line, |e| e.line);
    if kind != "cayley" {
        if let Some(c) = cayley {
            return Err(syntax(c.line, format!("[cayley] given but rules kind is '{kind}'")));
        }
    }
    if kind != "pairs" {
        if let Some(p) = r.get("pairs") {
            return Err(syntax(p.line, "'pairs' only applies to kind = pairs"));
        }
    }
    let n = gs.len();
    match kind {
        "inverses" => Ok(default),
        "pairs" => {
            let e = r.require("pairs")?;
            let mut pairs = Vec::new();
            for token in e.value.split_whitespace() {
                let d = letters_to_digits(e.line, token, gs)?;
                if d.len() != 2 {
                    return Err(syntax(e.line, format!("pair '{token}' must have two labels")));
                }
                pairs.push((d[0], d[1]));
            }
            let rules = PairRules::new(n, pairs).map_err(|source| ConfigError::Group { line: e.line, source })?;
            Ok(CancellationRules::Presentation(rules))
        }
        "cayley" => {
            let c = cayley.ok_or_else(|| syntax(kind_line, "kind = cayley needs a [cayley] section"))?;
            let mut rows = Vec::with_capacity(c.order.len());
            for key in &c.order {
                let e = &c.entries[key];
                let label = letters_to_digits(e.line, key, gs)?;
                let cells = e
                    .value
                    .split_whitespace()
                    .map(|cell| match cell {
                        "!" => Ok(CayleyCell::Cancel),
                        w => letters_to_digits(e.line, w, gs).map(CayleyCell::Replace),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push((label, cells));
            }
            let table = CayleyTable::new(n, rows).map_err(|source| ConfigError::Group { line: c.line, source })?;
            Ok(CancellationRules::Cayley(table))
        }
        other => Err(syntax(kind_line, format!("unknown rules kind '{other}'"))),
    }
}

fn build_view(s: &Section) -> Result<Viewport, ConfigError> {
    s.allow(&["center", "half"])?;
    let center = s.get("center").map_or(Ok(Complex::new(0.0, 0.0)), parse_complex)?;
    let half_entry = s.require("half")?;
    let half = parse_f64(half_entry)?;
    if half <= 0.0 {
        return Err(syntax(half_entry.line, "half must be positive"));
    }
    Ok(Viewport::new(center, half))
}

pub fn parse_config(text: &str) -> Result<GroupConfig, ConfigError> {
    let sections = split_sections(text)?;
    let find = |kind: &str| sections.iter().find(|s| s.kind == kind);
    let generator_sections: Vec<&Section> = sections.iter().filter(|s| s.kind == "generator").collect();

    let group = find("group");
    if let Some(g) = group {
        g.allow(&["name", "preset"])?;
    }
    let preset_entry = group.and_then(|g| g.get("preset"));
    let base = match preset_entry {
        Some(e) => {
            if let Some(s) = generator_sections.first() {
                return Err(syntax(s.line, "generators cannot be combined with a preset"));
            }
            Some(preset(&e.value).map_err(|err| syntax(e.line, err.to_string()))?)
        }
        None => None,
    };
    let (generators, default_rules, preset_view, preset_name) = match base {
        Some(b) => (b.generators, b.rules, b.view, Some(b.name)),
        None => {
            if generator_sections.is_empty() {
                return Err(syntax(text.lines().count().max(1), "no generators defined"));
            }
            let gs = build_generators(&generator_sections)?;
            let rules = gs.presentation_rules();
            (gs, rules, None, None)
        }
    };
    let rules = build_rules(find("rules"), find("cayley"), &generators, default_rules)?;
    let view = match find("view") {
        Some(s) => Some(build_view(s)?),
        None => preset_view,
    };
    let name = group
        .and_then(|g| g.get("name"))
        .map(|e| e.value.clone())
        .or(preset_name)
        .unwrap_or_else(|| "custom".into());
    Ok(GroupConfig { name, generators, rules, view })
}
