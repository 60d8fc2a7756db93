use std::fmt::Write;

use super::lexer::is_ident_char;
use super::parser::KEYWORDS;
use super::{Document, Item};
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;
use crate::model::schema::{Path, Schema};

/// Quotes `name` if it would not read back as a single identifier.
pub fn quote(name: &str) -> String {
    let bare = !name.is_empty()
        && name.chars().all(is_ident_char)
        && !name.contains("->")
        && !KEYWORDS.contains(&name);
    if bare {
        return name.to_string();
    }
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn path(s: &Schema, p: &Path) -> String {
    if p.is_identity() {
        return "id".into();
    }
    p.arrows
        .iter()
        .map(|&a| quote(s.arrow_name(a)))
        .collect::<Vec<_>>()
        .join(".")
}

/// Canonical text of `doc`; parsing it back gives an equal document.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (n, d) in doc.decls.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        let name = quote(&d.name);
        match &d.item {
            Item::Schema(s) => schema(&mut out, &name, s),
            Item::Instance { schema, instance } => {
                let _ = write!(out, "instance {name} on {} ", quote(schema));
                self::instance(&mut out, instance);
            }
            Item::Translation {
                source,
                target,
                translation: f,
            } => {
                let (c, dd) = (f.source(), f.target());
                let _ = writeln!(
                    out,
                    "translation {name} : {} -> {} {{",
                    quote(source),
                    quote(target)
                );
                let g = c.graph();
                if g.vertex_count() > 0 {
                    let nodes: Vec<String> = g
                        .vertices()
                        .map(|v| {
                            format!(
                                "{} -> {}",
                                quote(g.vertex_name(v)),
                                quote(dd.vertex_name(f.vertex(v)))
                            )
                        })
                        .collect();
                    let _ = writeln!(out, "  nodes {};", nodes.join(", "));
                }
                if g.arrow_count() > 0 {
                    out.push_str("  arrows\n");
                    for a in g.arrows() {
                        let _ = writeln!(
                            out,
                            "    {} -> {};",
                            quote(g.arrow_name(a)),
                            path(dd, f.arrow(a))
                        );
                    }
                }
                out.push_str("}\n");
            }
            Item::Morphism {
                source,
                target,
                morphism,
            } => {
                let _ = writeln!(
                    out,
                    "morphism {name} : {} -> {} {{",
                    quote(source),
                    quote(target)
                );
                components(&mut out, morphism, "  ");
                out.push_str("}\n");
            }
            Item::Typed {
                instance,
                typing,
                typed,
            } => {
                let _ = writeln!(out, "typedinstance {name} {{");
                let _ = writeln!(out, "  instance {};", quote(instance));
                let _ = writeln!(out, "  typing {};", quote(typing));
                out.push_str("  components {\n");
                components(&mut out, typed.typing(), "    ");
                out.push_str("  }\n}\n");
            }
        }
    }
    out
}

fn schema(out: &mut String, name: &str, s: &Schema) {
    let g = s.graph();
    if g.vertex_count() == 0 {
        let _ = writeln!(out, "schema {name} {{}}");
        return;
    }
    let _ = writeln!(out, "schema {name} {{");
    let nodes: Vec<String> = g.vertices().map(|v| quote(g.vertex_name(v))).collect();
    let _ = writeln!(out, "  nodes {};", nodes.join(", "));
    if g.arrow_count() > 0 {
        out.push_str("  arrows\n");
        for a in g.arrows() {
            let _ = writeln!(
                out,
                "    {} : {} -> {};",
                quote(g.arrow_name(a)),
                quote(g.vertex_name(g.source(a))),
                quote(g.vertex_name(g.target(a)))
            );
        }
    }
    if !s.equations().is_empty() {
        out.push_str("  equations\n");
        for eq in s.equations() {
            let _ = writeln!(
                out,
                "    {} : {} = {};",
                quote(g.vertex_name(eq.lhs.source)),
                path(s, &eq.lhs),
                path(s, &eq.rhs)
            );
        }
    }
    out.push_str("}\n");
}

fn instance(out: &mut String, i: &Instance) {
    if i.is_empty() {
        out.push_str("{}\n");
        return;
    }
    out.push_str("{\n");
    let g = i.schema().graph();
    for v in g.vertices() {
        if i.row_count(v) == 0 {
            continue;
        }
        let _ = writeln!(out, "  table {} {{", quote(g.vertex_name(v)));
        for r in 0..i.row_count(v) {
            let _ = write!(out, "    {}", quote(i.row_id(v, r)));
            let arrows = g.outgoing(v);
            if !arrows.is_empty() {
                let cells: Vec<String> = arrows
                    .iter()
                    .map(|&a| {
                        format!(
                            "({} = {})",
                            quote(g.arrow_name(a)),
                            quote(i.row_id(g.target(a), i.apply(a, r)))
                        )
                    })
                    .collect();
                let _ = write!(out, " -> {}", cells.join(" "));
            }
            out.push('\n');
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}

fn components(out: &mut String, m: &InstanceMorphism, indent: &str) {
    let (s, t) = (m.source(), m.target());
    let g = s.schema().graph();
    for v in g.vertices() {
        if s.row_count(v) == 0 {
            continue;
        }
        let _ = writeln!(out, "{indent}{} {{", quote(g.vertex_name(v)));
        for (r, &x) in m.component(v).iter().enumerate() {
            let _ = writeln!(
                out,
                "{indent}  {} -> {}",
                quote(s.row_id(v, r)),
                quote(t.row_id(v, x))
            );
        }
        let _ = writeln!(out, "{indent}}}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn quoting() {
        assert_eq!(quote("Em101"), "Em101");
        assert_eq!(quote("$65"), "$65");
        assert_eq!(quote("Bob Smith"), "\"Bob Smith\"");
        assert_eq!(quote("table"), "\"table\"");
        assert_eq!(quote(""), "\"\"");
        assert_eq!(quote("a->b"), "\"a->b\"");
        assert_eq!(quote("say \"hi\""), "\"say \\\"hi\\\"\"");
    }

    #[test]
    fn round_trip_all_kinds() {
        let text = r#"
schema C { nodes A, B; arrows f : A -> B; g : B -> B; equations B : g.g = id; }
instance I on C { table A { "a 1" -> (f = b1) } table B { b1 -> (g = b1) } }
translation F : C -> C { nodes A -> A, B -> B; arrows f -> f; g -> g; }
morphism m : I -> I { A { "a 1" -> "a 1" } B { b1 -> b1 } }
typedinstance T { instance I; typing I; components { A { "a 1" -> "a 1" } B { b1 -> b1 } } }
"#;
        let doc = parse(text).unwrap();
        let printed = print(&doc);
        let again = parse(&printed).unwrap();
        assert_eq!(again, doc);
        assert_eq!(print(&again), printed);
    }

    #[test]
    fn empty_forms() {
        assert_eq!(print(&Document::default()), "");
        let doc = parse("schema E {} instance Z on E {}").unwrap();
        assert_eq!(print(&doc), "schema E {}\n\ninstance Z on E {}\n");
    }
}
