use tdch::generator::{generate, GeneratorSpec};
use tdch::io::{parse_graph, parse_hierarchy, parse_queries, write_graph, write_hierarchy, write_queries};
use tdch::harness::sample_queries;
use tdch::preprocess::{condense, preprocess, ContractionConfig, OrderingStrategy};

#[test]
fn generated_graph_roundtrips() {
    let g = generate(&GeneratorSpec::random(60, 3.0, 4)).unwrap();
    let text = write_graph(&g);
    let back = parse_graph(&text).unwrap();
    assert_eq!(back.edges(), g.edges());
    assert_eq!(write_graph(&back), text);
}

#[test]
fn hierarchies_roundtrip_in_both_modes() {
    let g = generate(&GeneratorSpec::grid(5, 4, 2)).unwrap();
    for config in [ContractionConfig::exact(), ContractionConfig::approx(0.25)] {
        let h = preprocess(&g, &OrderingStrategy::default(), &config);
        let text = write_hierarchy(&h);
        let back = parse_hierarchy(&text).unwrap();
        assert!(back == h);
        assert_eq!(write_hierarchy(&back), text);
        let c = condense(&h);
        assert!(parse_hierarchy(&write_hierarchy(&c)).unwrap() == c);
    }
}

#[test]
fn queries_roundtrip() {
    let g = generate(&GeneratorSpec::grid(3, 3, 2)).unwrap();
    let qs = sample_queries(&g, 50, 9, None);
    assert_eq!(parse_queries(&write_queries(&qs)).unwrap(), qs);
}

#[test]
fn corrupted_hierarchy_lines_are_reported() {
    let g = generate(&GeneratorSpec::grid(3, 3, 2)).unwrap();
    let h = preprocess(&g, &OrderingStrategy::default(), &ContractionConfig::exact());
    let text = write_hierarchy(&h);
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();

    let mut flipped = lines.clone();
    let first = flipped[3].clone();
    flipped[3] = if first.starts_with('u') { first.replacen('u', "d", 1) } else { first.replacen('d', "u", 1) };
    let e = parse_hierarchy(&flipped.join("\n")).unwrap_err();
    assert_eq!(e.line, 4, "{e}");

    lines[3].push_str(" 7");
    let e = parse_hierarchy(&lines.join("\n")).unwrap_err();
    assert_eq!(e.line, 4);

    assert_eq!(parse_hierarchy("tch 1 fuzzy 0\n").unwrap_err().line, 1);
}
