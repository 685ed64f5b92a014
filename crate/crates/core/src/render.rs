//! Orbit evaluation and rasterization.
//!
//! Limit-set renders plot the endpoint of every maximal-length word applied to
//! a seed point. Tessellation renders draw, for every word, the image of the
//! base circle of its first generator under the rest of the word.
//!
//! Every pixel keeps the highest-priority mark written to it, where priority
//! orders by depth and then by lowest starting generator. The raster is
//! therefore a function of the set of words only, not of the order in which
//! an enumerator produced them, and partial canvases merge deterministically.

use std::fmt;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::thread;

use thiserror::Error;

use crate::enumerate::{self, split_range, EnumerateError, EnumerationMode, EnumerationStats, EnumeratorConfig};
use crate::groups::{CancellationRules, GeneratorKind, GeneratorSet};
use crate::moebius::{circumcircle, Circle, Complex, MoebiusError, Point};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("generator '{0}' has no base circle: {1}")]
    NoBaseCircle(char, MoebiusError),
    #[error("invalid render job: {0}")]
    InvalidJob(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RenderKind {
    LimitSet,
    Tessellation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const BLACK: Rgb = Rgb([0, 0, 0]);
    pub const WHITE: Rgb = Rgb([255, 255, 255]);

    fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mut out = [0u8; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let (a, b) = (self.0[k] as f64, other.0[k] as f64);
            *slot = (a + (b - a) * t).round().clamp(0.0, 255.0) as u8;
        }
        Rgb(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaletteMode {
    /// Linear RGB gradient from `shallow` (depth 1) to `deep` (max depth).
    ByDepth,
    /// Fixed color cycle keyed by the first generator applied.
    ByFirstGenerator,
}

const GENERATOR_COLORS: [Rgb; 8] = [
    Rgb([230, 57, 70]),
    Rgb([69, 123, 157]),
    Rgb([255, 183, 3]),
    Rgb([42, 157, 143]),
    Rgb([168, 218, 220]),
    Rgb([244, 162, 97]),
    Rgb([131, 56, 236]),
    Rgb([241, 250, 238]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    pub mode: PaletteMode,
    pub shallow: Rgb,
    pub deep: Rgb,
    pub background: Rgb,
}

impl Palette {
    pub fn by_depth() -> Self {
        Palette {
            mode: PaletteMode::ByDepth,
            shallow: Rgb([25, 40, 110]),
            deep: Rgb([235, 245, 255]),
            background: Rgb::BLACK,
        }
    }

    pub fn by_generator() -> Self {
        Palette { mode: PaletteMode::ByFirstGenerator, ..Palette::by_depth() }
    }

    pub fn color(&self, depth: usize, max_depth: usize, first_generator: u8) -> Rgb {
        match self.mode {
            PaletteMode::ByDepth => {
                let t = if max_depth <= 1 {
                    1.0
                } else {
                    (depth.clamp(1, max_depth) - 1) as f64 / (max_depth - 1) as f64
                };
                self.shallow.lerp(self.deep, t)
            }
            PaletteMode::ByFirstGenerator => GENERATOR_COLORS[first_generator as usize % GENERATOR_COLORS.len()],
        }
    }
}

/// Square region of the plane centered at `center`; `half_extent` is half the
/// side along the shorter image dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub center: Complex,
    pub half_extent: f64,
}

impl Viewport {
    pub fn new(center: Complex, half_extent: f64) -> Self {
        Viewport { center, half_extent }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscStyle {
    Fill,
    Stroke,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedPolicy {
    /// First finite fixed point among the generators.
    FixedPoint,
    Explicit(Complex),
}

#[derive(Debug, Clone)]
pub struct RenderJob {
    pub generators: GeneratorSet,
    pub rules: CancellationRules,
    pub enumerator: EnumeratorConfig,
    pub kind: RenderKind,
    pub viewport: Viewport,
    pub width: usize,
    pub height: usize,
    pub palette: Palette,
    pub disc_style: DiscStyle,
    pub seed: SeedPolicy,
    /// Worker threads for index modes; tree mode always runs on one.
    pub jobs: usize,
}

impl RenderJob {
    pub fn new(
        generators: GeneratorSet,
        rules: CancellationRules,
        enumerator: EnumeratorConfig,
        kind: RenderKind,
    ) -> Self {
        RenderJob {
            generators,
            rules,
            enumerator,
            kind,
            viewport: Viewport::new(Complex::new(0.0, 0.0), 1.2),
            width: 512,
            height: 512,
            palette: Palette::by_depth(),
            disc_style: DiscStyle::Fill,
            seed: SeedPolicy::FixedPoint,
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<(), RenderError> {
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::InvalidJob("resolution must be positive".into()));
        }
        if !(self.viewport.half_extent.is_finite() && self.viewport.half_extent > 0.0) {
            return Err(RenderError::InvalidJob("viewport half-extent must be positive".into()));
        }
        if !self.viewport.center.is_finite() {
            return Err(RenderError::InvalidJob("viewport center must be finite".into()));
        }
        if self.generators.len() != self.enumerator.base() || self.rules.alphabet_len() != self.enumerator.base() {
            return Err(RenderError::InvalidJob(format!(
                "{} generators, {} rule symbols, base {}",
                self.generators.len(),
                self.rules.alphabet_len(),
                self.enumerator.base()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        ImageBuffer { width, height, pixels: vec![fill; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<Rgb> {
        (x < self.width && y < self.height).then(|| self.pixels[y * self.width + x])
    }

    /// Writes outside the buffer are ignored.
    pub fn set(&mut self, x: usize, y: usize, color: Rgb) {
        if x < self.width && y < self.height {
            self.pixels[y * self.width + x] = color;
        }
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    /// Binary PPM: `P6\n<w> <h>\n255\n` then row-major RGB bytes.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(&p.0);
        }
        out
    }

    /// Parses the exact layout written by [`ImageBuffer::to_ppm`].
    pub fn from_ppm(bytes: &[u8]) -> Option<ImageBuffer> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            let rest = bytes.get(pos..)?;
            let end = rest.iter().position(|b| b.is_ascii_whitespace())?;
            fields.push(std::str::from_utf8(&rest[..end]).ok()?.to_owned());
            pos += end + 1;
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return None;
        }
        let width: usize = fields[1].parse().ok()?;
        let height: usize = fields[2].parse().ok()?;
        let body = bytes.get(pos..)?;
        if body.len() != width * height * 3 {
            return None;
        }
        let pixels = body.chunks_exact(3).map(|c| Rgb([c[0], c[1], c[2]])).collect();
        Some(ImageBuffer { width, height, pixels })
    }
}

pub fn write_image(buf: &ImageBuffer, path: &Path) -> Result<(), RenderError> {
    let io_err = |source| RenderError::Io { path: path.to_path_buf(), source };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(&buf.to_ppm()).map_err(io_err)?;
    file.flush().map_err(io_err)
}

/// Counters reported alongside an image.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderStats {
    pub words_examined: u64,
    pub words_processed: u64,
    pub skipped_by_cancellation: u64,
    pub dropped_at_infinity: u64,
    pub points_plotted: u64,
    pub discs_drawn: u64,
    pub discs_skipped: u64,
    pub outside_viewport: u64,
}

impl RenderStats {
    fn absorb(&mut self, e: &EnumerationStats) {
        self.words_examined += e.examined;
        self.words_processed += e.visited;
        self.skipped_by_cancellation += e.skipped;
    }

    fn merge(&mut self, o: &RenderStats) {
        self.words_examined += o.words_examined;
        self.words_processed += o.words_processed;
        self.skipped_by_cancellation += o.skipped_by_cancellation;
        self.dropped_at_infinity += o.dropped_at_infinity;
        self.points_plotted += o.points_plotted;
        self.discs_drawn += o.discs_drawn;
        self.discs_skipped += o.discs_skipped;
        self.outside_viewport += o.outside_viewport;
    }
}

impl fmt::Display for RenderStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "words_examined={}", self.words_examined)?;
        writeln!(f, "words_processed={}", self.words_processed)?;
        writeln!(f, "skipped_by_cancellation={}", self.skipped_by_cancellation)?;
        writeln!(f, "dropped_at_infinity={}", self.dropped_at_infinity)?;
        writeln!(f, "points_plotted={}", self.points_plotted)?;
        writeln!(f, "discs_drawn={}", self.discs_drawn)?;
        writeln!(f, "discs_skipped={}", self.discs_skipped)?;
        write!(f, "outside_viewport={}", self.outside_viewport)
    }
}

/// Input point for limit-set orbits: a finite fixed point of the first
/// generator that has one. A reflection fixes its whole circle, so its
/// rightmost boundary point is used. Falls back to the origin.
pub fn seed_point(gs: &GeneratorSet) -> Complex {
    gs.generators()
        .iter()
        .find_map(|g| match &g.kind {
            GeneratorKind::Conformal(m) => m.fixed_points().finite_points().first().copied(),
            GeneratorKind::AntiConformal(c) => Some(c.point_at(0.0)),
        })
        .unwrap_or(Complex::new(0.0, 0.0))
}

/// Applies the word right to left to `z0`.
pub fn evaluate_orbit_endpoint(word: &[u8], gs: &GeneratorSet, z0: Complex) -> Point {
    word.iter()
        .rev()
        .fold(Point::Finite(z0), |p, &d| gs.get(d).apply(p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitDisc {
    pub depth: usize,
    /// `None` when this step's image is a line (the map's pole was on the
    /// previous circle).
    pub circle: Option<Circle>,
}

#[derive(Clone, Copy)]
enum Carried {
    Circle(Circle),
    Points([Point; 3]),
}

/// Images of the first generator's base circle after each symbol read right
/// to left: depth 1 is the base circle of the rightmost symbol, depth k its
/// image under the k-1 symbols to its left. A step whose image is a line is
/// reported as `None`; three boundary points are carried through it so the
/// following steps still resolve to circles.
pub fn evaluate_orbit_discs(word: &[u8], gs: &GeneratorSet, base_circles: &[Circle]) -> Vec<OrbitDisc> {
    let mut out = Vec::with_capacity(word.len());
    let Some((&first, rest)) = word.split_last() else {
        return out;
    };
    let mut carried = Carried::Circle(base_circles[first as usize]);
    out.push(OrbitDisc { depth: 1, circle: Some(base_circles[first as usize]) });
    for (k, &d) in rest.iter().rev().enumerate() {
        let g = gs.get(d);
        carried = step_disc(g, carried);
        let circle = match carried {
            Carried::Circle(c) => Some(c),
            Carried::Points(_) => None,
        };
        out.push(OrbitDisc { depth: k + 2, circle });
    }
    out
}

fn step_disc(g: &crate::groups::Generator, carried: Carried) -> Carried {
    let third = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / 3.0;
    match carried {
        Carried::Circle(c) => match g.image_of_circle(&c) {
            Ok(img) => Carried::Circle(img),
            Err(_) => Carried::Points([0, 1, 2].map(|k| g.apply(Point::Finite(c.point_at(third(k)))))),
        },
        Carried::Points(pts) => {
            let mapped = pts.map(|p| g.apply(p));
            match mapped.map(Point::finite) {
                [Some(a), Some(b), Some(c)] => match circumcircle(a, b, c) {
                    Some(circle) => Carried::Circle(circle),
                    None => Carried::Points(mapped),
                },
                _ => Carried::Points(mapped),
            }
        }
    }
}

/// Per-pixel priority raster. Priority 0 means untouched.
struct Canvas {
    width: usize,
    height: usize,
    marks: Vec<u32>,
    scale: f64,
    origin: Complex,
}

impl Canvas {
    fn new(job: &RenderJob) -> Self {
        let scale = 2.0 * job.viewport.half_extent / job.width.min(job.height) as f64;
        Canvas {
            width: job.width,
            height: job.height,
            marks: vec![0; job.width * job.height],
            scale,
            origin: job.viewport.center,
        }
    }

    fn priority(depth: usize, first_generator: u8) -> u32 {
        ((depth as u32) << 8) | (255 - first_generator as u32)
    }

    /// Continuous pixel coordinates, y axis up.
    fn to_pixel(&self, z: Complex) -> (f64, f64) {
        let px = (z.re - self.origin.re) / self.scale + self.width as f64 / 2.0;
        let py = self.height as f64 / 2.0 - (z.im - self.origin.im) / self.scale;
        (px, py)
    }

    fn mark(&mut self, x: i64, y: i64, priority: u32) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        let slot = &mut self.marks[y as usize * self.width + x as usize];
        *slot = (*slot).max(priority);
        true
    }

    fn plot(&mut self, z: Complex, priority: u32) -> bool {
        let (px, py) = self.to_pixel(z);
        if !(px.is_finite() && py.is_finite()) {
            return false;
        }
        self.mark(px.floor() as i64, py.floor() as i64, priority)
    }

    fn disc(&mut self, c: &Circle, style: DiscStyle, priority: u32) {
        let (cx, cy) = self.to_pixel(c.center());
        let r = c.radius() / self.scale;
        if !(cx.is_finite() && cy.is_finite() && r.is_finite()) {
            return;
        }
        let (w, h) = (self.width as f64, self.height as f64);
        if cx + r < 0.0 || cy + r < 0.0 || cx - r > w || cy - r > h {
            return;
        }
        if r < 0.5 {
            self.mark(cx.floor() as i64, cy.floor() as i64, priority);
            return;
        }
        let row_lo = ((cy - r - 0.5).floor().max(0.0)) as i64;
        let row_hi = ((cy + r + 0.5).ceil().min(h - 1.0)) as i64;
        for row in row_lo..=row_hi {
            let dy = row as f64 + 0.5 - cy;
            match style {
                DiscStyle::Fill => {
                    if dy.abs() > r {
                        continue;
                    }
                    let half = (r * r - dy * dy).sqrt();
                    let lo = (cx - half - 0.5).ceil().max(0.0) as i64;
                    let hi = (cx + half - 0.5).floor().min(w - 1.0) as i64;
                    for col in lo..=hi {
                        self.mark(col, row, priority);
                    }
                }
                DiscStyle::Stroke => {
                    let outer = r + 0.5;
                    if dy.abs() > outer {
                        continue;
                    }
                    let half_out = (outer * outer - dy * dy).sqrt();
                    let inner = (r - 0.5).max(0.0);
                    let half_in = if dy.abs() < inner { (inner * inner - dy * dy).sqrt() } else { 0.0 };
                    let spans = [(cx - half_out, cx - half_in), (cx + half_in, cx + half_out)];
                    for (a, b) in spans {
                        let lo = (a - 0.5).ceil().max(0.0) as i64;
                        let hi = (b - 0.5).floor().min(w - 1.0) as i64;
                        for col in lo..=hi {
                            self.mark(col, row, priority);
                        }
                    }
                }
            }
        }
    }

    fn merge(&mut self, other: &Canvas) {
        for (a, &b) in self.marks.iter_mut().zip(&other.marks) {
            *a = (*a).max(b);
        }
    }

    fn into_image(self, palette: &Palette, max_depth: usize) -> ImageBuffer {
        let pixels = self
            .marks
            .iter()
            .map(|&m| {
                if m == 0 {
                    palette.background
                } else {
                    palette.color((m >> 8) as usize, max_depth, (255 - (m & 0xff)) as u8)
                }
            })
            .collect();
        ImageBuffer { width: self.width, height: self.height, pixels }
    }
}

fn base_circles(gs: &GeneratorSet) -> Result<Vec<Circle>, RenderError> {
    gs.generators()
        .iter()
        .map(|g| g.base_circle().map_err(|e| RenderError::NoBaseCircle(g.label, e)))
        .collect()
}

fn render_range(
    job: &RenderJob,
    cfg: &EnumeratorConfig,
    seed: Complex,
    bases: &[Circle],
) -> Result<(Canvas, RenderStats), RenderError> {
    let mut canvas = Canvas::new(job);
    let mut stats = RenderStats::default();
    let d = cfg.max_depth();
    let gs = &job.generators;
    let style = job.disc_style;
    let enum_stats = {
        let mut sink = |w: &[u8]| {
            let first = w[w.len() - 1];
            let priority = Canvas::priority(w.len(), first);
            match job.kind {
                RenderKind::LimitSet => {
                    if w.len() != d {
                        return;
                    }
                    match evaluate_orbit_endpoint(w, gs, seed) {
                        Point::Finite(z) => {
                            stats.points_plotted += 1;
                            if !canvas.plot(z, priority) {
                                stats.outside_viewport += 1;
                            }
                        }
                        Point::Infinity => stats.dropped_at_infinity += 1,
                    }
                }
                RenderKind::Tessellation => {
                    let discs = evaluate_orbit_discs(w, gs, bases);
                    match discs.last().and_then(|disc| disc.circle) {
                        Some(c) => {
                            stats.discs_drawn += 1;
                            canvas.disc(&c, style, priority);
                        }
                        None => stats.discs_skipped += 1,
                    }
                }
            }
        };
        match cfg.mode() {
            EnumerationMode::LexicographicTree => Ok(enumerate::enumerate_lexicographic(
                &job.rules,
                d,
                job.kind == RenderKind::LimitSet,
                &mut sink,
            )),
            _ => enumerate::enumerate_index(&job.rules, cfg, &mut sink),
        }?
    };
    stats.absorb(&enum_stats);
    Ok((canvas, stats))
}

/// Ordinal integers whose bijective expansion has exactly `d` digits.
fn top_layer(cfg: &EnumeratorConfig) -> Result<(u128, u128), EnumerateError> {
    let below = enumerate::counts(cfg.base(), cfg.max_depth() - 1)?.n_t;
    let (_, end) = cfg.full_range()?;
    Ok((below + 1, end))
}

fn resolve_seed(job: &RenderJob) -> Complex {
    match job.seed {
        SeedPolicy::FixedPoint => seed_point(&job.generators),
        SeedPolicy::Explicit(z) => z,
    }
}

/// The finite endpoints a limit-set render of `job` would plot, in
/// enumeration order (unclipped).
pub fn limit_points(job: &RenderJob) -> Result<Vec<Complex>, RenderError> {
    job.validate()?;
    let seed = resolve_seed(job);
    let cfg = &job.enumerator;
    let d = cfg.max_depth();
    let mut points = Vec::new();
    let mut sink = |w: &[u8]| {
        if w.len() == d {
            if let Point::Finite(z) = evaluate_orbit_endpoint(w, &job.generators, seed) {
                points.push(z);
            }
        }
    };
    match cfg.mode() {
        EnumerationMode::LexicographicTree => {
            enumerate::enumerate_lexicographic(&job.rules, d, true, &mut sink);
        }
        _ => {
            enumerate::enumerate_index(&job.rules, cfg, &mut sink)?;
        }
    }
    Ok(points)
}

pub fn render(job: &RenderJob) -> Result<(ImageBuffer, RenderStats), RenderError> {
    job.validate()?;
    let seed = resolve_seed(job);
    let bases = match job.kind {
        RenderKind::Tessellation => base_circles(&job.generators)?,
        RenderKind::LimitSet => Vec::new(),
    };
    let mut cfg = job.enumerator;
    if cfg.mode() == EnumerationMode::IndexOrdinal && cfg.range().is_none() && job.kind == RenderKind::LimitSet {
        let (a, b) = top_layer(&cfg)?;
        cfg = cfg.with_range(a, b)?;
    }
    let parts = if cfg.mode() == EnumerationMode::LexicographicTree {
        vec![None]
    } else {
        let (a, b) = cfg.effective_range()?;
        split_range(a, b, job.jobs.max(1)).into_iter().map(Some).collect()
    };
    let configs = parts
        .into_iter()
        .map(|p| match p {
            Some((a, b)) => cfg.with_range(a, b),
            None => Ok(cfg),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let results: Vec<Result<(Canvas, RenderStats), RenderError>> = if configs.len() == 1 {
        vec![render_range(job, &configs[0], seed, &bases)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = configs
                .iter()
                .map(|c| {
                    let bases = &bases;
                    s.spawn(move || render_range(job, c, seed, bases))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("render worker panicked")).collect()
        })
    };

    let mut merged: Option<Canvas> = None;
    let mut stats = RenderStats::default();
    for r in results {
        let (canvas, s) = r?;
        stats.merge(&s);
        match merged.as_mut() {
            Some(m) => m.merge(&canvas),
            None => merged = Some(canvas),
        }
    }
    let canvas = merged.expect("at least one range");
    Ok((canvas.into_image(&job.palette, cfg.max_depth()), stats))
}
