//! Named programs, lemmas and derivation scripts shipped with the crate.
//!
//! Program files may contain `%! include NAME` lines, replaced by the text
//! of the named program (each file at most once per expansion).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::derivation::{Resolver, Script};
use crate::kernel::{parse_program, Program};
use crate::verify::{Lemma, LemmaSpec};

macro_rules! assets {
    ($dir:literal, $ext:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../assets/", $dir, "/", $name, $ext)))),*]
    };
}

const PROGRAMS: &[(&str, &str)] = assets!("programs", ".lp":
    "all_leq", "all_less", "append", "filter", "findmin", "insertion_base", "inssort", "lemma_context",
    "mergesort_base", "minlist", "msort", "naive_sort", "ord1", "ord2", "partition", "perm1", "perm2",
    "perm3", "permq", "qsort", "quicksort_base", "selection_base", "selsort", "shuffle", "split",
    "tamaki_sato",
);

const SCRIPTS: &[(&str, &str)] = assets!("scripts", ".json":
    "tamaki_sato", "insertion", "selection", "mergesort", "quicksort",
);

const LEMMAS: &str = include_str!("../../assets/lemmas.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Program,
    Lemma,
    Script,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Program(Program),
    Lemma(Lemma),
    Script(Script),
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub kind: EntryKind,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
    #[error("{name}: {reason}")]
    Invalid { name: String, reason: String },
    #[error("include cycle through `{0}`")]
    IncludeCycle(String),
    #[error("{0}")]
    Io(String),
}

/// An immutable set of named sources. Names are unique within a kind; a
/// program and a lemma may share a name.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    programs: BTreeMap<String, String>,
    scripts: BTreeMap<String, String>,
    lemmas: Vec<LemmaSpec>,
}

impl Corpus {
    /// The embedded corpus.
    pub fn builtin() -> Corpus {
        Corpus {
            programs: PROGRAMS.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect(),
            scripts: SCRIPTS.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect(),
            lemmas: serde_json::from_str(LEMMAS).expect("embedded lemmas parse"),
        }
    }

    /// Reads `programs/*.lp`, `scripts/*.json` and `lemmas.json` under `dir`.
    pub fn from_dir(dir: &Path) -> Result<Corpus, CorpusError> {
        let io = |e: std::io::Error| CorpusError::Io(e.to_string());
        let read_kind = |sub: &str, ext: &str| -> Result<BTreeMap<String, String>, CorpusError> {
            let mut out = BTreeMap::new();
            let d = dir.join(sub);
            if !d.exists() {
                return Ok(out);
            }
            for e in std::fs::read_dir(&d).map_err(io)? {
                let path = e.map_err(io)?.path();
                if path.extension().and_then(|x| x.to_str()) == Some(ext) {
                    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                    out.insert(name, std::fs::read_to_string(&path).map_err(io)?);
                }
            }
            Ok(out)
        };
        let lemma_path = dir.join("lemmas.json");
        let lemmas = if lemma_path.exists() {
            let text = std::fs::read_to_string(&lemma_path).map_err(io)?;
            serde_json::from_str(&text).map_err(|e| CorpusError::Invalid { name: "lemmas".into(), reason: e.to_string() })?
        } else {
            Vec::new()
        };
        Ok(Corpus { programs: read_kind("programs", "lp")?, scripts: read_kind("scripts", "json")?, lemmas })
    }

    /// Writes the corpus in the layout read by [`Corpus::from_dir`].
    pub fn export(&self, dir: &Path) -> Result<(), CorpusError> {
        let io = |e: std::io::Error| CorpusError::Io(e.to_string());
        for (sub, ext, files) in [("programs", "lp", &self.programs), ("scripts", "json", &self.scripts)] {
            std::fs::create_dir_all(dir.join(sub)).map_err(io)?;
            for (name, text) in files {
                std::fs::write(dir.join(sub).join(format!("{name}.{ext}")), text).map_err(io)?;
            }
        }
        let mut lemmas = serde_json::to_string_pretty(&self.lemmas).expect("lemmas serialize");
        lemmas.push('\n');
        std::fs::write(dir.join("lemmas.json"), lemmas).map_err(io)
    }

    pub fn list(&self, kind: Option<EntryKind>) -> Vec<String> {
        let mut out = Vec::new();
        let want = |k| kind.is_none_or(|x| x == k);
        if want(EntryKind::Program) {
            out.extend(self.programs.keys().cloned());
        }
        if want(EntryKind::Lemma) {
            let mut ls: Vec<String> = self.lemmas.iter().map(|l| l.id.clone()).collect();
            ls.sort();
            out.extend(ls);
        }
        if want(EntryKind::Script) {
            out.extend(self.scripts.keys().cloned());
        }
        out
    }

    /// Program text with includes expanded.
    pub fn program_text(&self, name: &str) -> Result<String, CorpusError> {
        fn expand(
            c: &Corpus,
            name: &str,
            stack: &mut Vec<String>,
            done: &mut BTreeSet<String>,
            out: &mut String,
        ) -> Result<(), CorpusError> {
            if stack.iter().any(|n| n == name) {
                return Err(CorpusError::IncludeCycle(name.to_string()));
            }
            if !done.insert(name.to_string()) {
                return Ok(());
            }
            let text = c.programs.get(name).ok_or_else(|| CorpusError::UnknownEntry(name.to_string()))?;
            stack.push(name.to_string());
            for line in text.lines() {
                match line.trim().strip_prefix("%! include ") {
                    Some(inc) => expand(c, inc.trim(), stack, done, out)?,
                    None => {
                        out.push_str(line);
                        out.push('\n');
                    }
                }
            }
            stack.pop();
            Ok(())
        }
        let mut out = String::new();
        expand(self, name, &mut Vec::new(), &mut BTreeSet::new(), &mut out)?;
        Ok(out)
    }

    pub fn program(&self, name: &str) -> Result<Program, CorpusError> {
        let text = self.program_text(name)?;
        let mut p = parse_program(&text).map_err(|e| CorpusError::Invalid { name: name.into(), reason: e.to_string() })?;
        p.name = name.to_string();
        Ok(p)
    }

    pub fn lemma(&self, id: &str) -> Result<Lemma, CorpusError> {
        let spec = self.lemmas.iter().find(|l| l.id == id).ok_or_else(|| CorpusError::UnknownEntry(id.into()))?;
        Lemma::from_spec(spec).map_err(|e| CorpusError::Invalid { name: id.into(), reason: e.to_string() })
    }

    pub fn all_lemmas(&self) -> Result<Vec<Lemma>, CorpusError> {
        self.lemmas.iter().map(|s| self.lemma(&s.id)).collect()
    }

    pub fn script(&self, name: &str) -> Result<Script, CorpusError> {
        let text = self.scripts.get(name).ok_or_else(|| CorpusError::UnknownEntry(name.into()))?;
        Script::from_json(text).map_err(|e| CorpusError::Invalid { name: name.into(), reason: e.to_string() })
    }

    /// Raw script file text, as shipped.
    pub fn script_text(&self, name: &str) -> Option<&str> {
        self.scripts.get(name).map(String::as_str)
    }

    /// Looks `name` up among programs, then lemmas, then scripts.
    pub fn load(&self, name: &str) -> Result<CorpusEntry, CorpusError> {
        let entry = |kind, payload| CorpusEntry { name: name.to_string(), kind, payload };
        if self.programs.contains_key(name) {
            return Ok(entry(EntryKind::Program, Payload::Program(self.program(name)?)));
        }
        if self.lemmas.iter().any(|l| l.id == name) {
            return Ok(entry(EntryKind::Lemma, Payload::Lemma(self.lemma(name)?)));
        }
        if self.scripts.contains_key(name) {
            return Ok(entry(EntryKind::Script, Payload::Script(self.script(name)?)));
        }
        Err(CorpusError::UnknownEntry(name.to_string()))
    }

    pub fn load_kind(&self, kind: EntryKind, name: &str) -> Result<CorpusEntry, CorpusError> {
        let payload = match kind {
            EntryKind::Program => Payload::Program(self.program(name)?),
            EntryKind::Lemma => Payload::Lemma(self.lemma(name)?),
            EntryKind::Script => Payload::Script(self.script(name)?),
        };
        Ok(CorpusEntry { name: name.to_string(), kind, payload })
    }

    /// Adds or replaces a script source.
    pub fn insert_script(&mut self, name: &str, text: String) {
        self.scripts.insert(name.to_string(), text);
    }
}

impl Resolver for Corpus {
    fn program(&self, name: &str) -> Option<Program> {
        Corpus::program(self, name).ok()
    }

    fn lemmas(&self) -> Vec<Lemma> {
        self.all_lemmas().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{program_to_string, PredKey};

    #[test]
    fn load_examples() {
        let c = Corpus::builtin();
        for (name, n) in [("perm1", 4), ("shuffle", 4)] {
            let Payload::Program(p) = c.load(name).unwrap().payload else { panic!("{name} is a program") };
            assert_eq!(p.len(), n, "{name}");
        }
        assert_eq!(c.load("nosuch").unwrap_err(), CorpusError::UnknownEntry("nosuch".into()));
    }

    #[test]
    fn listings() {
        let c = Corpus::builtin();
        let programs = c.list(Some(EntryKind::Program));
        for name in [
            "perm1", "perm2", "perm3", "split", "shuffle", "ord1", "ord2", "minlist", "findmin", "filter",
            "partition", "all_less", "all_leq", "append", "naive_sort", "tamaki_sato", "inssort", "selsort",
            "msort", "qsort",
        ] {
            assert!(programs.contains(&name.to_string()), "{name}");
        }
        assert_eq!(
            c.list(Some(EntryKind::Lemma)),
            vec!["append", "append_element", "insert", "merging", "minlist", "minlist_transfer"]
        );
        assert_eq!(
            c.list(Some(EntryKind::Script)),
            vec!["insertion", "mergesort", "quicksort", "selection", "tamaki_sato"]
        );
    }

    #[test]
    fn includes_expand_once() {
        let c = Corpus::builtin();
        let p = c.program("naive_sort").unwrap();
        assert_eq!(p.clauses()[0].id, "c1");
        assert_eq!(p.clauses()[0].key(), PredKey::new("sort", 2));
        assert_eq!(p.len(), 1 + 4 + 3);
        let ctx = c.program("lemma_context").unwrap();
        let defs = ctx.defined_predicates();
        let unique: BTreeSet<_> = defs.iter().collect();
        assert_eq!(defs.len(), unique.len());
    }

    #[test]
    fn every_program_round_trips() {
        let c = Corpus::builtin();
        for name in c.list(Some(EntryKind::Program)) {
            let p = c.program(&name).unwrap();
            let again = parse_program(&program_to_string(&p)).unwrap();
            assert!(crate::kernel::alpha_equivalent_programs(&p, &again), "{name}");
        }
    }

    #[test]
    fn scripts_are_bit_exact() {
        let c = Corpus::builtin();
        for name in c.list(Some(EntryKind::Script)) {
            let text = c.script_text(&name).unwrap();
            assert_eq!(c.script(&name).unwrap().to_json(), text, "{name}");
        }
    }

    #[test]
    fn export_and_reload() {
        let c = Corpus::builtin();
        let dir = std::env::temp_dir().join(format!("lpt-corpus-{}", std::process::id()));
        c.export(&dir).unwrap();
        let back = Corpus::from_dir(&dir).unwrap();
        assert_eq!(back.list(None), c.list(None));
        assert_eq!(back.program_text("perm3").unwrap(), c.program_text("perm3").unwrap());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
