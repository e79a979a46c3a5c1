use serde::Serialize;

use super::RegressionResult;

/// `***` for p < 0.01, `**` for p < 0.05, `*` for p < 0.1.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableColumn {
    pub model: usize,
    pub covariate: String,
    #[serde(flatten)]
    pub result: RegressionResult,
    pub stars_beta: &'static str,
    pub stars_alpha: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct RenderedTable {
    pub dependent: String,
    pub se_type: &'static str,
    pub columns: Vec<TableColumn>,
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub csv: String,
}

const CSV_HEADER: &str = "model,covariate,alpha,se_alpha,t_alpha,p_alpha,beta,se_beta,t_beta,p_beta,r2,adj_r2,resid_se,f_stat,n,stars_beta";

/// Renders one regression per column in the usual stacked-coefficient
/// layout, plus a full-precision CSV of the same numbers.
///
/// # Panics
///
/// Panics if `results` and `covariate_labels` differ in length.
pub fn render_table(results: &[RegressionResult], dependent_label: &str, covariate_labels: &[&str]) -> RenderedTable {
    assert_eq!(results.len(), covariate_labels.len(), "one label per regression");
    let columns: Vec<TableColumn> = results
        .iter()
        .zip(covariate_labels)
        .enumerate()
        .map(|(i, (r, label))| TableColumn {
            model: i + 1,
            covariate: label.to_string(),
            result: *r,
            stars_beta: significance_stars(r.p_beta),
            stars_alpha: significance_stars(r.p_alpha),
        })
        .collect();

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for c in &columns {
        let r = &c.result;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.model,
            csv_field(&c.covariate),
            r.alpha,
            r.se_alpha,
            r.t_alpha,
            r.p_alpha,
            r.beta,
            r.se_beta,
            r.t_beta,
            r.p_beta,
            r.r2,
            r.adj_r2,
            r.resid_se,
            r.f_stat,
            r.n,
            c.stars_beta
        ));
    }

    RenderedTable {
        dependent: dependent_label.to_string(),
        se_type: "classical",
        text: render_text(&columns, dependent_label),
        csv,
        columns,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_text(columns: &[TableColumn], dependent: &str) -> String {
    let k = columns.len();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();

    for (i, c) in columns.iter().enumerate() {
        let mut coef = vec![String::new(); k];
        let mut se = vec![String::new(); k];
        coef[i] = format!("{:.3}{}", c.result.beta, c.stars_beta);
        se[i] = format!("({:.3})", c.result.se_beta);
        rows.push((c.covariate.clone(), coef));
        rows.push((String::new(), se));
        rows.push((String::new(), vec![String::new(); k]));
    }
    rows.push((
        "Constant".into(),
        columns.iter().map(|c| format!("{:.3}{}", c.result.alpha, c.stars_alpha)).collect(),
    ));
    rows.push((
        String::new(),
        columns.iter().map(|c| format!("({:.3})", c.result.se_alpha)).collect(),
    ));
    let stats: Vec<(String, Vec<String>)> = vec![
        ("Observations".into(), columns.iter().map(|c| c.result.n.to_string()).collect()),
        ("R2".into(), columns.iter().map(|c| format!("{:.3}", c.result.r2)).collect()),
        ("Adjusted R2".into(), columns.iter().map(|c| format!("{:.3}", c.result.adj_r2)).collect()),
        (
            "Residual Std. Error".into(),
            columns
                .iter()
                .map(|c| format!("{:.3} (df = {})", c.result.resid_se, c.result.df_resid()))
                .collect(),
        ),
        (
            "F Statistic".into(),
            columns
                .iter()
                .map(|c| {
                    format!(
                        "{:.3}{} (df = 1; {})",
                        c.result.f_stat,
                        significance_stars(c.result.p_beta),
                        c.result.df_resid()
                    )
                })
                .collect(),
        ),
    ];

    let headers: Vec<String> = (1..=k).map(|i| format!("({i})")).collect();
    let label_w = rows
        .iter()
        .chain(&stats)
        .map(|(l, _)| l.chars().count())
        .max()
        .unwrap_or(0)
        .max("Note:".len());
    let col_w = rows
        .iter()
        .chain(&stats)
        .flat_map(|(_, cells)| cells.iter().map(|c| c.chars().count()))
        .chain(headers.iter().map(|h| h.len()))
        .max()
        .unwrap_or(0)
        + 2;
    let total = label_w + col_w * k;
    let line = |ch: char| ch.to_string().repeat(total);
    let fmt_row = |label: &str, cells: &[String]| {
        let mut s = pad_right(label, label_w);
        for c in cells {
            s.push_str(&pad_left(c, col_w));
        }
        s.trim_end().to_string()
    };

    let mut out = Vec::new();
    out.push(line('='));
    let title = format!("Dependent variable: {dependent}");
    out.push(format!("{}{}", " ".repeat(label_w), center(&title, col_w * k)).trim_end().to_string());
    out.push(format!("{}{}", " ".repeat(label_w), "-".repeat(col_w * k)));
    out.push(fmt_row("", &headers));
    out.push(line('-'));
    for (l, cells) in &rows {
        out.push(fmt_row(l, cells));
    }
    out.push(line('-'));
    for (l, cells) in &stats {
        out.push(fmt_row(l, cells));
    }
    out.push(line('='));
    out.push(format!("{}{}", pad_right("Note:", label_w), pad_left("*p<0.1; **p<0.05; ***p<0.01", col_w * k)));
    let mut text = out.join("\n");
    text.push('\n');
    text
}

fn pad_left(s: &str, w: usize) -> String {
    let n = s.chars().count();
    format!("{}{s}", " ".repeat(w.saturating_sub(n)))
}

fn pad_right(s: &str, w: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(w.saturating_sub(n)))
}

fn center(s: &str, w: usize) -> String {
    let n = s.chars().count();
    let left = w.saturating_sub(n) / 2;
    format!("{}{s}", " ".repeat(left))
}
