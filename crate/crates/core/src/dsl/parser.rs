use std::collections::HashMap;
use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::{Decl, Document, Env, Item, ParseError};
use crate::migration::Translation;
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;
use crate::model::schema::{Graph, Path, Schema, VertexId};
use crate::typing::TypedInstance;

/// A vertex name and the `row -> row` pairs listed under it.
type Block = (Name, Vec<(Name, Name)>);

pub(crate) const KEYWORDS: &[&str] = &[
    "schema",
    "instance",
    "translation",
    "morphism",
    "typedinstance",
    "on",
    "nodes",
    "arrows",
    "equations",
    "table",
    "components",
    "typing",
    "id",
];

#[derive(Clone, Debug)]
struct Name {
    text: String,
    line: usize,
    column: usize,
}

impl Name {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, message)
    }
}

type Result<T> = std::result::Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    env: Env,
}

pub(crate) fn parse(text: &str, env: &Env) -> Result<Document> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        env: env.clone(),
    };
    let mut doc = Document::default();
    loop {
        let t = p.peek().clone();
        let decl = match &t.tok {
            Tok::Eof => break,
            Tok::Ident {
                text,
                quoted: false,
            } => match text.as_str() {
                "schema" => p.schema()?,
                "instance" => p.instance()?,
                "translation" => p.translation()?,
                "morphism" => p.morphism()?,
                "typedinstance" => p.typed()?,
                _ => return Err(p.unexpected(&t, DECL_START)),
            },
            _ => return Err(p.unexpected(&t, DECL_START)),
        };
        p.env.insert(&decl);
        doc.decls.push(decl);
    }
    Ok(doc)
}

const DECL_START: &[&str] = &[
    "`schema`",
    "`instance`",
    "`translation`",
    "`morphism`",
    "`typedinstance`",
];

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, t: &Token, expected: &[&str]) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            message: format!("unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token> {
        let t = self.peek().clone();
        if t.tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&t, &[&tok.describe()]))
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident { text, quoted: false } if text == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.unexpected(&t, &[&format!("`{kw}`")]))
        }
    }

    /// True if the next token is a name rather than a keyword or symbol.
    fn at_name(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident { quoted: true, .. } => true,
            Tok::Ident { text, .. } => !KEYWORDS.contains(&text.as_str()),
            _ => false,
        }
    }

    fn name(&mut self, what: &str) -> Result<Name> {
        let t = self.peek().clone();
        if self.at_name() {
            self.bump();
            let Tok::Ident { text, .. } = t.tok else {
                unreachable!()
            };
            Ok(Name {
                text,
                line: t.line,
                column: t.column,
            })
        } else {
            let mut e = self.unexpected(&t, &[what]);
            if matches!(t.tok, Tok::Ident { quoted: false, .. }) {
                e.message.push_str("; keywords used as names must be quoted");
            }
            Err(e)
        }
    }

    fn declare(&self, kind: &str, n: &Name) -> Result<()> {
        if self.env.contains(kind, &n.text) {
            Err(n.err(format!("duplicate {kind} `{}`", n.text)))
        } else {
            Ok(())
        }
    }

    fn schema_ref(&self, n: &Name) -> Result<Arc<Schema>> {
        self.env
            .schemas
            .get(&n.text)
            .cloned()
            .ok_or_else(|| n.err(format!("unknown schema `{}`", n.text)))
    }

    fn instance_ref(&self, n: &Name) -> Result<Arc<Instance>> {
        self.env
            .instances
            .get(&n.text)
            .cloned()
            .ok_or_else(|| n.err(format!("unknown instance `{}`", n.text)))
    }

    fn path_names(&mut self) -> Result<Vec<Name>> {
        if self.at_kw("id") {
            self.bump();
            return Ok(Vec::new());
        }
        let mut out = vec![self.name("an arrow name or `id`")?];
        while self.peek().tok == Tok::Dot {
            self.bump();
            out.push(self.name("an arrow name")?);
        }
        Ok(out)
    }

    fn resolve_path(schema: &Schema, source: VertexId, names: &[Name], at: &Name) -> Result<Path> {
        let arrows = names
            .iter()
            .map(|n| {
                schema
                    .arrow(&n.text)
                    .map_err(|_| n.err(format!("unknown arrow `{}` in schema `{}`", n.text, schema.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Path::new(source, arrows);
        schema.target(&p).map_err(|e| at.err(e.to_string()))?;
        Ok(p)
    }

    fn schema(&mut self) -> Result<Decl> {
        self.expect_kw("schema")?;
        let name = self.name("a schema name")?;
        self.declare("schema", &name)?;
        self.expect(Tok::LBrace)?;
        let mut g = Graph::new();
        let mut eqs: Vec<(Name, Vec<Name>, Vec<Name>)> = Vec::new();
        loop {
            if self.at_kw("nodes") {
                self.bump();
                loop {
                    let v = self.name("a vertex name")?;
                    g.add_vertex(v.text.clone())
                        .map_err(|_| v.err(format!("duplicate vertex `{}`", v.text)))?;
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                    } else {
                        self.expect(Tok::Semi)?;
                        break;
                    }
                }
            } else if self.at_kw("arrows") {
                self.bump();
                while self.at_name() {
                    let a = self.name("an arrow name")?;
                    self.expect(Tok::Colon)?;
                    let s = self.name("a vertex name")?;
                    self.expect(Tok::Arrow)?;
                    let t = self.name("a vertex name")?;
                    self.expect(Tok::Semi)?;
                    let sv = g
                        .vertex(&s.text)
                        .ok_or_else(|| s.err(format!("unknown vertex `{}`", s.text)))?;
                    let tv = g
                        .vertex(&t.text)
                        .ok_or_else(|| t.err(format!("unknown vertex `{}`", t.text)))?;
                    g.add_arrow(a.text.clone(), sv, tv).map_err(|_| {
                        a.err(format!(
                            "duplicate arrow `{}`; arrow names are schema-wide, so qualify \
                             them by table, e.g. `{}_{}`",
                            a.text, s.text, a.text
                        ))
                    })?;
                }
            } else if self.at_kw("equations") {
                self.bump();
                while self.at_name() {
                    let v = self.name("a vertex name")?;
                    self.expect(Tok::Colon)?;
                    let l = self.path_names()?;
                    self.expect(Tok::Eq)?;
                    let r = self.path_names()?;
                    self.expect(Tok::Semi)?;
                    eqs.push((v, l, r));
                }
            } else if self.peek().tok == Tok::RBrace {
                self.bump();
                break;
            } else {
                let t = self.peek().clone();
                return Err(self.unexpected(&t, &["`nodes`", "`arrows`", "`equations`", "`}`"]));
            }
        }
        let mut schema = Schema::new(name.text.clone(), g);
        for (v, l, r) in eqs {
            let src = schema
                .vertex(&v.text)
                .map_err(|_| v.err(format!("unknown vertex `{}`", v.text)))?;
            let lp = Self::resolve_path(&schema, src, &l, &v)?;
            let rp = Self::resolve_path(&schema, src, &r, &v)?;
            schema.add_equation(lp, rp).map_err(|e| v.err(e.to_string()))?;
        }
        Ok(Decl {
            name: name.text,
            item: Item::Schema(Arc::new(schema)),
        })
    }

    fn instance(&mut self) -> Result<Decl> {
        self.expect_kw("instance")?;
        let name = self.name("an instance name")?;
        self.declare("instance", &name)?;
        self.expect_kw("on")?;
        let sname = self.name("a schema name")?;
        let schema = self.schema_ref(&sname)?;
        self.expect(Tok::LBrace)?;
        let g = schema.graph();
        type Row = (Name, Vec<(Name, Name)>);
        let mut tables: Vec<Option<Vec<Row>>> = vec![None; g.vertex_count()];
        loop {
            if self.at_kw("table") {
                self.bump();
                let tn = self.name("a table name")?;
                let v = schema
                    .vertex(&tn.text)
                    .map_err(|_| tn.err(format!("unknown table `{}` in schema `{}`", tn.text, schema.name())))?;
                if tables[v.0].is_some() {
                    return Err(tn.err(format!("table `{}` is given twice", tn.text)));
                }
                self.expect(Tok::LBrace)?;
                let mut rows = Vec::new();
                while self.at_name() {
                    let id = self.name("a row id")?;
                    let mut cells = Vec::new();
                    if self.peek().tok == Tok::Arrow {
                        self.bump();
                        loop {
                            self.expect(Tok::LParen)?;
                            loop {
                                let a = self.name("a column name")?;
                                self.expect(Tok::Eq)?;
                                let val = self.name("a row id")?;
                                cells.push((a, val));
                                if self.peek().tok == Tok::Comma {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                            self.expect(Tok::RParen)?;
                            if self.peek().tok != Tok::LParen {
                                break;
                            }
                        }
                    }
                    rows.push((id, cells));
                }
                self.expect(Tok::RBrace)?;
                tables[v.0] = Some(rows);
            } else if self.peek().tok == Tok::RBrace {
                self.bump();
                break;
            } else {
                let t = self.peek().clone();
                return Err(self.unexpected(&t, &["`table`", "`}`"]));
            }
        }
        let tables: Vec<Vec<Row>> = tables.into_iter().map(Option::unwrap_or_default).collect();
        let mut index: Vec<HashMap<&str, usize>> = Vec::with_capacity(tables.len());
        for (v, rows) in tables.iter().enumerate() {
            let mut m = HashMap::new();
            for (i, (id, _)) in rows.iter().enumerate() {
                if m.insert(id.text.as_str(), i).is_some() {
                    return Err(id.err(format!(
                        "row `{}` appears twice in table `{}`",
                        id.text,
                        g.vertex_name(VertexId(v))
                    )));
                }
            }
            index.push(m);
        }
        let mut columns: Vec<Vec<usize>> = g
            .arrows()
            .map(|a| vec![usize::MAX; tables[g.source(a).0].len()])
            .collect();
        for (v, rows) in tables.iter().enumerate() {
            let vname = g.vertex_name(VertexId(v));
            for (i, (id, cells)) in rows.iter().enumerate() {
                for (a, val) in cells {
                    let arrow = schema
                        .arrow(&a.text)
                        .ok()
                        .filter(|&x| g.source(x) == VertexId(v))
                        .ok_or_else(|| {
                            a.err(format!("`{}` is not a column of table `{vname}`", a.text))
                        })?;
                    if columns[arrow.0][i] != usize::MAX {
                        return Err(a.err(format!(
                            "column `{}` of row `{}` is given twice",
                            a.text, id.text
                        )));
                    }
                    let t = g.target(arrow);
                    let j = index[t.0].get(val.text.as_str()).ok_or_else(|| {
                        val.err(format!(
                            "column `{}` of row `{}` refers to `{}`, which is not a row of table `{}`",
                            a.text,
                            id.text,
                            val.text,
                            g.vertex_name(t)
                        ))
                    })?;
                    columns[arrow.0][i] = *j;
                }
                for &arrow in g.outgoing(VertexId(v)) {
                    if columns[arrow.0][i] == usize::MAX {
                        return Err(id.err(format!(
                            "row `{}` of table `{vname}` has no value for column `{}`",
                            id.text,
                            g.arrow_name(arrow)
                        )));
                    }
                }
            }
        }
        let rows = tables
            .into_iter()
            .map(|rs| rs.into_iter().map(|(id, _)| id.text).collect())
            .collect();
        let instance = Instance::from_parts(schema.clone(), rows, columns)
            .map_err(|e| name.err(e.to_string()))?;
        Ok(Decl {
            name: name.text,
            item: Item::Instance {
                schema: sname.text,
                instance: Arc::new(instance),
            },
        })
    }

    fn translation(&mut self) -> Result<Decl> {
        self.expect_kw("translation")?;
        let name = self.name("a translation name")?;
        self.declare("translation", &name)?;
        self.expect(Tok::Colon)?;
        let sn = self.name("a schema name")?;
        let source = self.schema_ref(&sn)?;
        self.expect(Tok::Arrow)?;
        let tn = self.name("a schema name")?;
        let target = self.schema_ref(&tn)?;
        self.expect(Tok::LBrace)?;
        let sg = source.graph();
        let mut vmap: Vec<Option<VertexId>> = vec![None; sg.vertex_count()];
        let mut amap: Vec<Option<(Name, Vec<Name>)>> = vec![None; sg.arrow_count()];
        let close;
        loop {
            if self.at_kw("nodes") {
                self.bump();
                loop {
                    let a = self.name("a vertex name")?;
                    self.expect(Tok::Arrow)?;
                    let b = self.name("a vertex name")?;
                    let v = source
                        .vertex(&a.text)
                        .map_err(|_| a.err(format!("unknown vertex `{}` in schema `{}`", a.text, source.name())))?;
                    let w = target
                        .vertex(&b.text)
                        .map_err(|_| b.err(format!("unknown vertex `{}` in schema `{}`", b.text, target.name())))?;
                    if vmap[v.0].replace(w).is_some() {
                        return Err(a.err(format!("vertex `{}` is mapped twice", a.text)));
                    }
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                    } else {
                        self.expect(Tok::Semi)?;
                        break;
                    }
                }
            } else if self.at_kw("arrows") {
                self.bump();
                while self.at_name() {
                    let a = self.name("an arrow name")?;
                    self.expect(Tok::Arrow)?;
                    let path = self.path_names()?;
                    self.expect(Tok::Semi)?;
                    let arrow = source
                        .arrow(&a.text)
                        .map_err(|_| a.err(format!("unknown arrow `{}` in schema `{}`", a.text, source.name())))?;
                    if amap[arrow.0].replace((a.clone(), path)).is_some() {
                        return Err(a.err(format!("arrow `{}` is mapped twice", a.text)));
                    }
                }
            } else if self.peek().tok == Tok::RBrace {
                close = self.bump();
                break;
            } else {
                let t = self.peek().clone();
                return Err(self.unexpected(&t, &["`nodes`", "`arrows`", "`}`"]));
            }
        }
        let at_close = |msg: String| ParseError::new(close.line, close.column, msg);
        let vertex_map = vmap
            .iter()
            .enumerate()
            .map(|(v, w)| {
                w.ok_or_else(|| {
                    at_close(format!(
                        "vertex `{}` has no image",
                        sg.vertex_name(VertexId(v))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut arrow_map = Vec::with_capacity(sg.arrow_count());
        for a in sg.arrows() {
            let (an, names) = amap[a.0].clone().ok_or_else(|| {
                at_close(format!("arrow `{}` has no image", sg.arrow_name(a)))
            })?;
            let start = vertex_map[sg.source(a).0];
            let p = Self::resolve_path(&target, start, &names, &an)?;
            let want = vertex_map[sg.target(a).0];
            if target.path_target(&p) != want {
                return Err(an.err(format!(
                    "arrow `{}` must map to a path ending at `{}`, but `{}` ends at `{}`",
                    an.text,
                    target.vertex_name(want),
                    target.display_path(&p),
                    target.vertex_name(target.path_target(&p))
                )));
            }
            arrow_map.push(p);
        }
        let t = Translation::new(source, target, vertex_map, arrow_map)
            .map_err(|e| name.err(e.to_string()))?;
        Ok(Decl {
            name: name.text,
            item: Item::Translation {
                source: sn.text,
                target: tn.text,
                translation: Arc::new(t),
            },
        })
    }

    /// `V { a -> b ... } ...` until a closing brace, which is not consumed.
    fn component_blocks(&mut self) -> Result<Vec<Block>> {
        let mut out = Vec::new();
        while self.at_name() {
            let v = self.name("a table name")?;
            self.expect(Tok::LBrace)?;
            let mut entries = Vec::new();
            while self.at_name() {
                let a = self.name("a row id")?;
                self.expect(Tok::Arrow)?;
                let b = self.name("a row id")?;
                entries.push((a, b));
            }
            self.expect(Tok::RBrace)?;
            out.push((v, entries));
        }
        Ok(out)
    }

    fn components(
        source: &Instance,
        target: &Instance,
        blocks: Vec<Block>,
        at: &Token,
    ) -> Result<Vec<Vec<usize>>> {
        let schema = source.schema();
        let g = schema.graph();
        let mut comps: Vec<Vec<usize>> = g
            .vertices()
            .map(|v| vec![usize::MAX; source.row_count(v)])
            .collect();
        let mut seen = vec![false; g.vertex_count()];
        for (vn, entries) in blocks {
            let v = schema
                .vertex(&vn.text)
                .map_err(|_| vn.err(format!("unknown table `{}`", vn.text)))?;
            if std::mem::replace(&mut seen[v.0], true) {
                return Err(vn.err(format!("table `{}` is given twice", vn.text)));
            }
            for (a, b) in entries {
                let i = source.row_index(v, &a.text).ok_or_else(|| {
                    a.err(format!("`{}` is not a row of source table `{}`", a.text, vn.text))
                })?;
                let j = target.row_index(v, &b.text).ok_or_else(|| {
                    b.err(format!("`{}` is not a row of target table `{}`", b.text, vn.text))
                })?;
                if comps[v.0][i] != usize::MAX {
                    return Err(a.err(format!("row `{}` is mapped twice", a.text)));
                }
                comps[v.0][i] = j;
            }
        }
        for v in g.vertices() {
            if let Some(i) = comps[v.0].iter().position(|&x| x == usize::MAX) {
                return Err(ParseError::new(
                    at.line,
                    at.column,
                    format!(
                        "row `{}` of table `{}` is not mapped",
                        source.row_id(v, i),
                        g.vertex_name(v)
                    ),
                ));
            }
        }
        Ok(comps)
    }

    fn morphism(&mut self) -> Result<Decl> {
        self.expect_kw("morphism")?;
        let name = self.name("a morphism name")?;
        self.declare("morphism", &name)?;
        self.expect(Tok::Colon)?;
        let sn = self.name("an instance name")?;
        let source = self.instance_ref(&sn)?;
        self.expect(Tok::Arrow)?;
        let tn = self.name("an instance name")?;
        let target = self.instance_ref(&tn)?;
        if source.schema() != target.schema() {
            return Err(tn.err(format!(
                "instances `{}` and `{}` live on different schemas",
                sn.text, tn.text
            )));
        }
        self.expect(Tok::LBrace)?;
        let blocks = self.component_blocks()?;
        let close = self.expect(Tok::RBrace)?;
        let comps = Self::components(&source, &target, blocks, &close)?;
        let m = InstanceMorphism::from_components(source, target, comps)
            .map_err(|e| name.err(e.to_string()))?;
        Ok(Decl {
            name: name.text,
            item: Item::Morphism {
                source: sn.text,
                target: tn.text,
                morphism: Arc::new(m),
            },
        })
    }

    fn typed(&mut self) -> Result<Decl> {
        self.expect_kw("typedinstance")?;
        let name = self.name("a typed instance name")?;
        self.declare("typedinstance", &name)?;
        self.expect(Tok::LBrace)?;
        self.expect_kw("instance")?;
        let iname = self.name("an instance name")?;
        let inst = self.instance_ref(&iname)?;
        self.expect(Tok::Semi)?;
        self.expect_kw("typing")?;
        let pname = self.name("an instance name")?;
        let p = self.instance_ref(&pname)?;
        self.expect(Tok::Semi)?;
        if inst.schema() != p.schema() {
            return Err(pname.err(format!(
                "instances `{}` and `{}` live on different schemas",
                iname.text, pname.text
            )));
        }
        self.expect_kw("components")?;
        self.expect(Tok::LBrace)?;
        let blocks = self.component_blocks()?;
        let close = self.expect(Tok::RBrace)?;
        self.expect(Tok::RBrace)?;
        let comps = Self::components(&inst, &p, blocks, &close)?;
        let m = InstanceMorphism::from_components(inst, p, comps)
            .map_err(|e| name.err(e.to_string()))?;
        Ok(Decl {
            name: name.text,
            item: Item::Typed {
                instance: iname.text,
                typing: pname.text,
                typed: Arc::new(TypedInstance::new(m)),
            },
        })
    }
}
