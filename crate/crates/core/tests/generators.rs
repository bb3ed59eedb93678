use fracdim::generators::{gen_cantor, gen_point_mass, gen_sierpinski, gen_uniform};
use fracdim::io::{read_points, write_points, IngestOptions};
use fracdim::RawDataset;

fn parse(rows: &[&str]) -> Vec<f64> {
    rows.iter()
        .flat_map(|r| r.split(',').map(|f| f.parse::<f64>().unwrap()))
        .collect()
}

fn head(data: &RawDataset, k: usize) -> Vec<f64> {
    data.coords()[..k * data.dim()].to_vec()
}

#[test]
fn sierpinski_golden_prefix() {
    let want = parse(&[
        "0.4582767012286772,0.032596472744849704",
        "0.7291383506143386,0.016298236372424852",
        "0.3645691753071693,0.008149118186212426",
        "0.6822845876535847,0.004074559093106213",
        "0.34114229382679234,0.0020372795465531065",
        "0.6705711469133961,0.0010186397732765533",
        "0.5852855734566981,0.5005093198866383",
        "0.792642786728349,0.25025465994331914",
        "0.8963213933641745,0.12512732997165957",
        "0.6981606966820872,0.5625636649858298",
    ]);
    assert_eq!(head(&gen_sierpinski(1000, 42), 10), want);
}

#[test]
fn uniform_golden_prefix() {
    let want = parse(&[
        "0.6818961923066714,0.950275407672484,0.4275164028565197",
        "0.6273605211973403,0.2885938791411826,0.14995887029032495",
        "0.30804055959790966,0.8038727671756268,0.7712487808028571",
        "0.2385852643813393,0.5068668703400689,0.9018031720487739",
        "0.9569902689161411,0.592978570324334,0.7287984865007753",
        "0.17913640926317842,0.5753931466007073,0.17176229090062556",
        "0.44405233492097596,0.07639100408858734,0.15455833426248977",
        "0.32043076646759006,0.6996879885620405,0.07840548866625696",
        "0.03845410662958415,0.26182155040862376,0.8397759106446581",
        "0.759428656272891,0.6720067866941324,0.6821221065932423",
    ]);
    assert_eq!(head(&gen_uniform(1000, 3, 42), 10), want);
}

#[test]
fn cantor_golden_prefix() {
    let want = parse(&[
        "0.6941391598464819",
        "0.2313797199488273",
        "0.07712657331627577",
        "0.025708857772091923",
        "0.008569619257363974",
        "0.002856539752454658",
        "0.000952179917484886",
        "0.6669840599724949",
        "0.8889946866574983",
        "0.9629982288858328",
    ]);
    assert_eq!(head(&gen_cantor(1000, 42), 10), want);
}

#[test]
fn point_mass_golden_prefix() {
    assert_eq!(head(&gen_point_mass(1000, 2), 10), vec![0.5; 20]);
}

#[test]
fn output_sizes_are_exact() {
    for n in [1, 2, 17, 1000] {
        assert_eq!(gen_sierpinski(n, 1).len(), n);
        assert_eq!(gen_uniform(n, 4, 1).len(), n);
        assert_eq!(gen_cantor(n, 1).len(), n);
        assert_eq!(gen_point_mass(n, 3).len(), n);
    }
}

#[test]
fn fixtures_survive_a_text_round_trip() {
    let fixtures = [
        gen_sierpinski(5000, 3),
        gen_uniform(5000, 4, 3),
        gen_cantor(5000, 3),
        gen_point_mass(10, 5),
    ];
    for data in fixtures {
        for opts in [
            IngestOptions::default(),
            IngestOptions {
                delimiter: '\t',
                has_header: true,
                expected_dim: Some(data.dim()),
            },
        ] {
            let mut buf = Vec::new();
            write_points(&data, &mut buf, &opts).unwrap();
            assert_eq!(read_points(&buf[..], &opts).unwrap(), data);
        }
    }
}
