//! JSON file formats for modular data and coset systems.

use std::fs;
use std::io;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use mtc_coset_core::coset::{Branching, CosetSystem};
use mtc_coset_core::ModularData;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

/// Modular data on disk: `{name, labels[], s[][], twists[]}` with complex entries as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularDataFile {
    pub name: String,
    pub labels: Vec<String>,
    pub s: Vec<Vec<[f64; 2]>>,
    pub twists: Vec<[f64; 2]>,
}

/// A modular-data field of a coset file, given inline or as a path relative to the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Path(String),
    Inline(ModularDataFile),
}

/// One `Z^i_{αφ}` entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchEntry {
    pub c1: String,
    pub c2: String,
    pub mult: u32,
}

/// Coset system on disk. `branching` maps each ambient label to its nonzero entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetFile {
    pub c1: Source,
    pub c2: Source,
    pub ambient: Source,
    pub branching: Map<String, Value>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl ModularDataFile {
    pub fn from_data(md: &ModularData) -> Self {
        let n = md.rank();
        ModularDataFile {
            name: md.name().to_string(),
            labels: md.labels().to_vec(),
            s: (0..n).map(|a| (0..n).map(|b| pair(md.s(a, b))).collect()).collect(),
            twists: md.twists().iter().copied().map(pair).collect(),
        }
    }

    pub fn to_data(&self) -> Result<ModularData> {
        let rows: Vec<Vec<Complex64>> = self
            .s
            .iter()
            .map(|r| r.iter().copied().map(complex).collect())
            .collect();
        let twists = self.twists.iter().copied().map(complex).collect();
        ModularData::from_rows(self.name.clone(), self.labels.clone(), &rows, twists)
            .map_err(|e| anyhow!("malformed modular data: {e}"))
    }
}

impl CosetFile {
    /// Inline encoding of a coset system.
    pub fn from_system(cs: &CosetSystem) -> Self {
        let (md1, md2, mdc) = (cs.md1(), cs.md2(), cs.mdc());
        let mut branching = Map::new();
        for i in 0..mdc.rank() {
            let mut entries = Vec::new();
            for a in 0..md1.rank() {
                for f in 0..md2.rank() {
                    let mult = cs.z(i, a, f);
                    if mult > 0 {
                        entries.push(BranchEntry {
                            c1: md1.label(a).to_string(),
                            c2: md2.label(f).to_string(),
                            mult,
                        });
                    }
                }
            }
            let value = serde_json::to_value(entries).expect("entries serialize");
            branching.insert(mdc.label(i).to_string(), value);
        }
        CosetFile {
            c1: Source::Inline(ModularDataFile::from_data(md1)),
            c2: Source::Inline(ModularDataFile::from_data(md2)),
            ambient: Source::Inline(ModularDataFile::from_data(mdc)),
            branching,
        }
    }

    /// Resolves sources and label names. Core errors from assembling the
    /// system pass through unchanged.
    pub fn to_system(&self, base: &Path) -> Result<CosetSystem> {
        let (md1, md2, mdc) = self.resolve(base)?;
        let z = self.branching_matrix(&md1, &md2, &mdc)?;
        Ok(CosetSystem::new(md1, md2, mdc, z)?)
    }

    /// The three modular data, with paths taken relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<(ModularData, ModularData, ModularData)> {
        Ok((
            resolve(&self.c1, base).context("c1")?,
            resolve(&self.c2, base).context("c2")?,
            resolve(&self.ambient, base).context("ambient")?,
        ))
    }

    /// `Z^i_{αφ}` from the label-keyed entries.
    pub fn branching_matrix(&self, md1: &ModularData, md2: &ModularData, mdc: &ModularData) -> Result<Branching> {
        let mut z = vec![vec![vec![0u32; md2.rank()]; md1.rank()]; mdc.rank()];
        for (key, value) in &self.branching {
            let i = mdc
                .label_index(key)
                .ok_or_else(|| anyhow!("unknown ambient label {key:?}"))?;
            let entries: Vec<BranchEntry> = serde_json::from_value(value.clone())
                .with_context(|| format!("branching entries for {key:?}"))?;
            for e in entries {
                let a = md1
                    .label_index(&e.c1)
                    .ok_or_else(|| anyhow!("unknown c1 label {:?}", e.c1))?;
                let f = md2
                    .label_index(&e.c2)
                    .ok_or_else(|| anyhow!("unknown c2 label {:?}", e.c2))?;
                z[i][a][f] += e.mult;
            }
        }
        Ok(z)
    }
}

fn resolve(source: &Source, base: &Path) -> Result<ModularData> {
    match source {
        Source::Inline(f) => f.to_data(),
        Source::Path(p) => {
            let path = base.join(p);
            read_modular(&path)
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_modular(path: &Path) -> Result<ModularData> {
    read_json::<ModularDataFile>(path)?.to_data()
}

pub fn read_coset(path: &Path) -> Result<CosetSystem> {
    let file: CosetFile = read_json(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    file.to_system(&base)
}

/// Pretty JSON with every float written as `{:.16e}` (17 significant digits).
#[derive(Default)]
pub struct FixedFloatFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes with [`FixedFloatFormatter`].
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn write_modular(path: Option<&Path>, md: &ModularData) -> Result<()> {
    emit(path, &to_json(&ModularDataFile::from_data(md))?)
}

pub fn write_coset(path: Option<&Path>, cs: &CosetSystem) -> Result<()> {
    emit(path, &to_json(&CosetFile::from_system(cs))?)
}
