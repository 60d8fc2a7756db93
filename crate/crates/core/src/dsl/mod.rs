//! The `.cat` text format.
//!
//! ```text
//! # a comment
//! schema C { nodes A, B; arrows f : A -> B; g : B -> B; equations B : g.g = id; }
//! instance I on C { table A { a1 -> (f = b1) } table B { b1 -> (g = b1) } }
//! translation F : C -> C { nodes A -> A, B -> B; arrows f -> f; g -> id; }
//! morphism m : I -> I { A { a1 -> a1 } B { b1 -> b1 } }
//! typedinstance T { instance I; typing I; components { A { a1 -> a1 } B { b1 -> b1 } } }
//! ```
//!
//! Names are `[A-Za-z0-9_$-]+` or double-quoted strings with `\"` and `\\`
//! escapes. Declarations may only refer to names declared before them, in the
//! same document or in an [`Env`] of earlier documents. Parsing checks
//! structure (names, endpoints, totality of columns) but not equations or
//! naturality.

mod lexer;
mod parser;
mod printer;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::migration::Translation;
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;
use crate::model::schema::Schema;
use crate::typing::TypedInstance;

pub use printer::{print, quote};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// What would have been accepted at this position, if known.
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Schema(Arc<Schema>),
    Instance {
        schema: String,
        instance: Arc<Instance>,
    },
    Translation {
        source: String,
        target: String,
        translation: Arc<Translation>,
    },
    Morphism {
        source: String,
        target: String,
        morphism: Arc<InstanceMorphism>,
    },
    Typed {
        instance: String,
        typing: String,
        typed: Arc<TypedInstance>,
    },
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Schema(_) => "schema",
            Item::Instance { .. } => "instance",
            Item::Translation { .. } => "translation",
            Item::Morphism { .. } => "morphism",
            Item::Typed { .. } => "typedinstance",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub item: Item,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Decl>,
}

/// Named declarations visible to a document.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub schemas: HashMap<String, Arc<Schema>>,
    pub instances: HashMap<String, Arc<Instance>>,
    pub translations: HashMap<String, Arc<Translation>>,
    pub morphisms: HashMap<String, Arc<InstanceMorphism>>,
    pub typed: HashMap<String, Arc<TypedInstance>>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds every declaration of `doc`.
    pub fn extend(&mut self, doc: &Document) {
        for d in &doc.decls {
            self.insert(d);
        }
    }

    pub(crate) fn insert(&mut self, d: &Decl) {
        let n = d.name.clone();
        match &d.item {
            Item::Schema(s) => {
                self.schemas.insert(n, s.clone());
            }
            Item::Instance { instance, .. } => {
                self.instances.insert(n, instance.clone());
            }
            Item::Translation { translation, .. } => {
                self.translations.insert(n, translation.clone());
            }
            Item::Morphism { morphism, .. } => {
                self.morphisms.insert(n, morphism.clone());
            }
            Item::Typed { typed, .. } => {
                self.typed.insert(n, typed.clone());
            }
        }
    }

    pub(crate) fn contains(&self, kind: &str, name: &str) -> bool {
        match kind {
            "schema" => self.schemas.contains_key(name),
            "instance" => self.instances.contains_key(name),
            "translation" => self.translations.contains_key(name),
            "morphism" => self.morphisms.contains_key(name),
            _ => self.typed.contains_key(name),
        }
    }
}

impl Document {
    pub fn env(&self) -> Env {
        let mut e = Env::new();
        e.extend(self);
        e
    }

    pub fn get(&self, name: &str, kind: &str) -> Option<&Decl> {
        self.decls
            .iter()
            .find(|d| d.name == name && d.item.kind() == kind)
    }
}

/// Parses a standalone document.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    parser::parse(text, &Env::new())
}

/// Parses a document that may refer to declarations in `env`.
pub fn parse_with(text: &str, env: &Env) -> Result<Document, ParseError> {
    parser::parse(text, env)
}
