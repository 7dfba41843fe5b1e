//! Debug printer turning an AST back into ODDL source.

use std::fmt::Write;

use super::ast::*;

pub fn render_source(ast: &ModuleAst) -> String {
    let mut out = String::new();
    if let Some(v) = &ast.min_tool_version {
        let _ = writeln!(
            out,
            "@ModuleInfo {{ minToolVersion = {} }}",
            quote(&v.value)
        );
    }
    let _ = writeln!(out, "module {}", ast.module_name);
    for import in &ast.imports {
        let _ = writeln!(out, "import {}", quote(&import.path));
    }
    for c in &ast.consts {
        let _ = writeln!(out, "const {} = {}", c.name, literal(&c.value));
    }
    for a in &ast.type_aliases {
        let alts: Vec<String> = a.alternatives.iter().map(|s| quote(s)).collect();
        let _ = writeln!(out, "typealias {} = {}", a.name, alts.join(" | "));
    }
    for class in &ast.classes {
        let _ = writeln!(out, "class {} {{", class.name);
        for p in &class.properties {
            let _ = write!(out, "  {} : {}", p.name, p.declared_type.display_name());
            if let Some(c) = &p.constraint {
                let _ = write!(
                    out,
                    " (isBetween({}, {}))",
                    value_expr(&c.low),
                    value_expr(&c.high)
                );
            }
            if let Some(d) = &p.default {
                let _ = write!(out, " = {}", value_expr(d));
            }
            out.push('\n');
        }
        out.push_str("}\n");
    }
    for inst in &ast.instances {
        let _ = writeln!(
            out,
            "{} : {} = new {{",
            inst.name,
            inst.target_type.join(".")
        );
        block(&mut out, &inst.amendment, 1);
        out.push_str("}\n");
    }
    out
}

fn block(out: &mut String, b: &AmendmentBlock, depth: usize) {
    let pad = "  ".repeat(depth);
    for e in &b.entries {
        match &e.value {
            AmendValue::Leaf(l) => {
                let _ = writeln!(out, "{pad}{} = {}", e.name, literal(l));
            }
            AmendValue::Block(inner) => {
                let _ = writeln!(out, "{pad}{} {{", e.name);
                block(out, inner, depth + 1);
                let _ = writeln!(out, "{pad}}}");
            }
            AmendValue::Listing(records) => {
                let _ = writeln!(out, "{pad}{} {{", e.name);
                for r in records {
                    let fields: Vec<String> = r
                        .fields
                        .iter()
                        .map(|(n, v)| format!("{n} = {}", literal(v)))
                        .collect();
                    let _ = writeln!(out, "{pad}  new {{ {} }}", fields.join("; "));
                }
                let _ = writeln!(out, "{pad}}}");
            }
        }
    }
}

fn value_expr(v: &ValueExpr) -> String {
    match v {
        ValueExpr::Literal(l) => literal(l),
        ValueExpr::ConstRef(name) => name.clone(),
    }
}

fn literal(l: &Literal) -> String {
    match l {
        // Display never uses exponent notation, which the lexer does not accept.
        Literal::Float(f) => format!("{f}"),
        Literal::Boolean(b) => b.to_string(),
        Literal::String(s) => quote(s),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
