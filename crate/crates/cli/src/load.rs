//! Reading model and state documents, following `models "..."` imports.

use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use causex_core::dsl::query::Env;
use causex_core::dsl::{self, ParseError};

use crate::grammar;

/// Where documents come from.
pub trait Source {
    fn read(&self, path: &Path) -> Result<String, String>;
}

pub struct FileSystem;

impl Source for FileSystem {
    fn read(&self, path: &Path) -> Result<String, String> {
        std::fs::read_to_string(path).map_err(|e| e.to_string())
    }
}

/// The corpus compiled into the binary, addressed relative to its root.
pub struct Embedded;

impl Source for Embedded {
    fn read(&self, path: &Path) -> Result<String, String> {
        let key = normalize(path).to_string_lossy().replace('\\', "/");
        crate::corpus::FILES
            .iter()
            .find(|(name, _)| *name == key)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| format!("no such corpus file `{key}`"))
    }
}

/// Lexically resolves `.` and `..`.
pub fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other),
        }
    }
    out
}

/// Resolves `target` relative to the directory holding `from`.
pub fn relative_to(from: &Path, target: &str) -> PathBuf {
    normalize(&from.parent().unwrap_or(Path::new("")).join(target))
}

#[derive(Debug)]
pub enum LoadErrorKind {
    Io(String),
    Parse(ParseError),
    Conflict(String),
}

#[derive(Debug)]
pub struct LoadError {
    pub path: PathBuf,
    pub kind: LoadErrorKind,
    /// Grammar excerpt for the offending document.
    pub grammar: Option<&'static str>,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.path.display();
        match &self.kind {
            LoadErrorKind::Io(e) => write!(f, "{p}: cannot read: {e}"),
            LoadErrorKind::Parse(e) => write!(f, "{p}:{e}"),
            LoadErrorKind::Conflict(e) => write!(f, "{p}: {e}"),
        }
    }
}

impl std::error::Error for LoadError {}

/// Accumulates models and states from several documents.
pub struct Loader<'s> {
    source: &'s dyn Source,
    model_files: Vec<PathBuf>,
    state_files: Vec<PathBuf>,
    origin: Vec<(String, PathBuf)>,
    env: Env,
}

impl<'s> Loader<'s> {
    pub fn new(source: &'s dyn Source) -> Self {
        Loader { source, model_files: Vec::new(), state_files: Vec::new(), origin: Vec::new(), env: Env::default() }
    }

    fn read(&self, path: &Path) -> Result<String, LoadError> {
        self.source.read(path).map_err(|e| LoadError { path: path.to_path_buf(), kind: LoadErrorKind::Io(e), grammar: None })
    }

    pub fn load_models(&mut self, path: &Path) -> Result<(), LoadError> {
        let path = normalize(path);
        if self.model_files.contains(&path) {
            return Ok(());
        }
        let text = self.read(&path)?;
        let parse_err = |e| LoadError { path: path.clone(), kind: LoadErrorKind::Parse(e), grammar: Some(grammar::MODEL) };
        for m in dsl::parse_model(&text).map_err(parse_err)? {
            if let Some((_, other)) = self.origin.iter().find(|(id, _)| id == m.id()) {
                return Err(LoadError {
                    path: path.clone(),
                    kind: LoadErrorKind::Conflict(format!("model `{}` is also defined in {}", m.id(), other.display())),
                    grammar: None,
                });
            }
            self.origin.push((m.id().to_string(), path.clone()));
            self.env.models.push(Arc::new(m));
        }
        self.model_files.push(path);
        Ok(())
    }

    pub fn load_states(&mut self, path: &Path) -> Result<(), LoadError> {
        let path = normalize(path);
        if self.state_files.contains(&path) {
            return Ok(());
        }
        let text = self.read(&path)?;
        let parse_err = |e| LoadError { path: path.clone(), kind: LoadErrorKind::Parse(e), grammar: Some(grammar::STATE) };
        let doc = dsl::parse_state_document(&text).map_err(parse_err)?;
        for (import, _) in &doc.imports {
            self.load_models(&relative_to(&path, import))?;
        }
        for (name, state) in dsl::resolve_states(&doc, &self.env.models).map_err(parse_err)? {
            if self.env.state(&name).is_some() {
                return Err(LoadError {
                    path: path.clone(),
                    kind: LoadErrorKind::Conflict(format!("state `{name}` is defined more than once")),
                    grammar: None,
                });
            }
            self.env.states.push((name, state));
        }
        self.state_files.push(path);
        Ok(())
    }

    pub fn finish(self) -> Env {
        self.env
    }
}
