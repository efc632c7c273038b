//! Reliability metrics on the reference annotation counts.

use viewsnip_core::corpus::Viewpoint;
use viewsnip_core::evaluate::{build_report, confusion, no_viewpoint_table, render_text};
use viewsnip_core::synth::{annotations_from_counts, reference_counts};

fn close(a: Option<f64>, b: f64) -> bool {
    a.is_some_and(|a| (a - b).abs() <= 0.1)
}

#[test]
fn no_viewpoint_rates() {
    let want = [
        ("query_based", [36.67, 21.67, 24.67], 28.10),
        ("manual", [12.0, 12.5, 3.33], 9.05),
        ("framework", [12.67, 25.83, 22.0], 19.76),
    ];
    let counts = reference_counts();
    for ((method, groups), (m, rows, total)) in counts.iter().zip(want) {
        assert_eq!(*method, m);
        let recs = annotations_from_counts(method, groups);
        assert_eq!(recs.len(), 420);
        let t = no_viewpoint_table(&recs, method);
        for v in Viewpoint::ALL {
            assert!(
                close(t.rows[v.index()].percent, rows[v.index()]),
                "{method} {v}"
            );
        }
        assert!(close(t.total.percent, total), "{method}: {:?}", t.total);
    }
}

#[test]
fn framework_confusion_and_accuracy() {
    let (_, groups) = reference_counts()[2];
    let recs = annotations_from_counts("framework", &groups);
    let c = confusion(&recs, "framework");
    assert_eq!(c.counts, [[110, 19, 2], [19, 46, 24], [7, 14, 96]]);
    let row_pct = [
        [83.97, 14.50, 1.53],
        [21.35, 51.69, 26.97],
        [5.98, 11.97, 82.05],
    ];
    for (got_row, want_row) in c.row_percent.iter().zip(row_pct) {
        for (got, want) in got_row.iter().zip(want_row) {
            assert!(close(*got, want), "{got:?} vs {want}");
        }
    }
    assert_eq!(
        (c.accurate, c.viewpoint_bearing, c.total_annotations),
        (252, 337, 420)
    );
    assert!(close(c.accuracy_viewpoint_bearing, 74.78));
    assert!(close(c.accuracy_overall, 60.0));
}

#[test]
fn report_over_all_methods() {
    let mut recs = Vec::new();
    for (m, groups) in reference_counts() {
        recs.extend(annotations_from_counts(m, &groups));
    }
    let methods: Vec<String> = ["query_based", "manual", "framework"]
        .map(String::from)
        .to_vec();
    let pairs = vec![
        ("framework".to_string(), "query_based".to_string()),
        ("framework".to_string(), "manual".to_string()),
    ];
    let report = build_report(&recs, &methods, &pairs, false).unwrap();
    assert_eq!(report.chi_square.len(), 8);
    for e in &report.chi_square {
        let r = e.result.as_ref().unwrap();
        assert!((0.0..=1.0).contains(&r.p_value));
        let n: u64 = e.table.iter().flatten().sum();
        assert_eq!(n, e.truth.map_or(840, |t| [300, 240, 300][t.index()]));
    }
    // framework beats query-based on accuracy: 252 vs 155 accurate of 420
    let acc = report
        .chi_square
        .iter()
        .find(|e| e.label == "framework vs query_based, accuracy")
        .unwrap();
    assert_eq!(acc.table, vec![vec![252, 168], vec![155, 265]]);
    assert!(acc.result.as_ref().unwrap().p_value < 1e-9);
    let text = render_text(&report);
    assert!(text.contains("Accuracy: 252/337 viewpoint-bearing (74.78%), 252/420 overall (60.00%)"));
    assert!(text.contains("Total           83 (19.76%)"));
}
