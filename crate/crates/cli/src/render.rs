use catmig::model::VertexId;
use catmig::Instance;

/// Header and rows of one table, `ID` first, columns in declaration order.
pub fn table_cells(i: &Instance, v: VertexId) -> (Vec<String>, Vec<Vec<String>>) {
    let g = i.schema().graph();
    let arrows = g.outgoing(v);
    let mut header = vec!["ID".to_string()];
    header.extend(arrows.iter().map(|&a| g.arrow_name(a).to_string()));
    let rows = (0..i.row_count(v))
        .map(|r| {
            let mut row = vec![i.row_id(v, r).to_string()];
            row.extend(
                arrows
                    .iter()
                    .map(|&a| i.row_id(g.target(a), i.apply(a, r)).to_string()),
            );
            row
        })
        .collect();
    (header, rows)
}

pub fn ascii(i: &Instance, only: Option<VertexId>) -> String {
    let g = i.schema().graph();
    let mut out = String::new();
    for v in g.vertices().filter(|&v| only.is_none_or(|o| o == v)) {
        if !out.is_empty() {
            out.push('\n');
        }
        let (header, rows) = table_cells(i, v);
        let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &rows {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            padded.join(" | ").trim_end().to_string() + "\n"
        };
        out.push_str(g.vertex_name(v));
        out.push('\n');
        out.push_str(&line(&header));
        let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row));
        }
    }
    out
}

pub fn csv(i: &Instance, v: VertexId) -> Result<String, csv::Error> {
    let (header, rows) = table_cells(i, v);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in &rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output of utf-8 input"))
}
