//! Single-file HTML rendering of a meeting report.
//!
//! Output depends only on the project state: no generation timestamp, no
//! external assets, fixed section and column order.

use std::fmt::Write;

use crate::error::Result;
use crate::ids::EntityId;
use crate::report::MeetingReport;
use crate::state::ProjectState;

const STYLE: &str = "body{font-family:sans-serif;margin:2em}\
table{border-collapse:collapse;margin-bottom:1.5em}\
th,td{border:1px solid #999;padding:4px 8px;text-align:left;vertical-align:top}\
ul.thread{margin:0;padding-left:1.2em}";

/// Escapes text for use in element content and quoted attributes.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn actor_name(state: &ProjectState, id: &EntityId) -> String {
    state
        .project
        .actor(id)
        .map(|a| a.name.clone())
        .unwrap_or_else(|| id.to_string())
}

fn lot_code(state: &ProjectState, id: &EntityId) -> String {
    state
        .project
        .lot(id)
        .map(|l| l.code.clone())
        .unwrap_or_else(|| id.to_string())
}

fn table(out: &mut String, caption: &str, headers: &[&str], rows: Vec<Vec<String>>) {
    let _ = writeln!(out, "<h2>{}</h2>", escape(caption));
    out.push_str("<table>\n<tr>");
    for h in headers {
        let _ = write!(out, "<th>{}</th>", escape(h));
    }
    out.push_str("</tr>\n");
    for row in rows {
        out.push_str("<tr>");
        for cell in row {
            // Cells arrive already escaped.
            let _ = write!(out, "<td>{cell}</td>");
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</table>\n");
}

/// Renders one report: header, presence, progress, then remarks with their
/// reaction threads.
pub fn render_report(state: &ProjectState, report: &EntityId) -> Result<String> {
    let r = state.require_report(report)?;
    Ok(render(state, r))
}

fn render(state: &ProjectState, r: &MeetingReport) -> String {
    let project = &state.project;
    let title = format!("{} meeting report #{}", project.name, r.sequence);
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{}</title>", escape(&title));
    let _ = writeln!(out, "<style>{STYLE}</style>");
    out.push_str("</head>\n<body>\n");

    let _ = writeln!(out, "<h1>{}</h1>", escape(&title));
    out.push_str("<dl>\n");
    for (term, value) in [
        ("Project", format!("{} ({})", project.name, project.id)),
        ("Meeting date", r.meeting_date.to_string()),
        ("Sequence", r.sequence.to_string()),
        ("Status", r.status.as_str().to_owned()),
    ] {
        let _ = writeln!(out, "<dt>{}</dt><dd>{}</dd>", escape(term), escape(&value));
    }
    out.push_str("</dl>\n");

    let presence = r
        .presence
        .iter()
        .map(|p| {
            let actor = project.actor(&p.actor_id);
            vec![
                escape(&actor_name(state, &p.actor_id)),
                escape(actor.map(|a| a.organization.as_str()).unwrap_or("")),
                escape(actor.map(|a| a.role.as_str()).unwrap_or("")),
                escape(p.status.as_str()),
            ]
        })
        .collect();
    table(&mut out, "Presence", &["Actor", "Organization", "Role", "Attendance"], presence);

    let progress = r
        .progress
        .iter()
        .map(|p| {
            vec![
                escape(&lot_code(state, &p.lot_id)),
                escape(project.lot(&p.lot_id).map(|l| l.label.as_str()).unwrap_or("")),
                format!("{}%", p.percent_complete),
                escape(&p.note),
            ]
        })
        .collect();
    table(&mut out, "Progress", &["Lot", "Label", "Complete", "Note"], progress);

    let remarks = r
        .remark_dispositions
        .iter()
        .map(|d| {
            let remark = state.remark(&d.remark_id);
            let responsible = remark
                .map(|m| {
                    m.responsible
                        .iter()
                        .map(|a| actor_name(state, a))
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .unwrap_or_default();
            let mut thread = String::new();
            if let Some(m) = remark.filter(|m| !m.reactions.is_empty()) {
                thread.push_str("<ul class=\"thread\">");
                for reaction in &m.reactions {
                    let _ = write!(
                        thread,
                        "<li>{} ({}): {}</li>",
                        escape(&actor_name(state, &reaction.author)),
                        escape(&reaction.at.to_string()),
                        escape(&reaction.body)
                    );
                }
                thread.push_str("</ul>");
            }
            vec![
                remark.map(|m| m.number.to_string()).unwrap_or_default(),
                escape(&d.snapshot_text),
                escape(&responsible),
                escape(&remark.map(|m| lot_code(state, &m.lot_id)).unwrap_or_default()),
                escape(d.status_at_validation.as_str()),
                thread,
            ]
        })
        .collect();
    table(
        &mut out,
        "Remarks",
        &["No.", "Remark", "Responsible", "Lot", "Status", "Reactions"],
        remarks,
    );

    out.push_str("</body>\n</html>\n");
    out
}
