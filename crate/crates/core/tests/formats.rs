use proptest::prelude::*;
use retina_core::io::manifest::{manifest_from_json, manifest_to_json};
use retina_core::io::npy::{decode_npy, encode_npy};
use retina_core::io::render::{rasterize_grid, Colormap, Normalize};
use retina_core::io::{read_array, read_manifest, read_report, render_histogram, render_kernel_grid, write_array,
    write_manifest, write_report};
use retina_core::*;

fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..6, 1..=4)
}

fn array_strategy() -> impl Strategy<Value = ArrayFile> {
    (shape_strategy(), any::<bool>()).prop_flat_map(|(shape, wide)| {
        let n: usize = shape.iter().product();
        if wide {
            proptest::collection::vec(any::<u64>(), n)
                .prop_map(move |bits| {
                    ArrayFile::new(shape.clone(), ArrayData::F64(bits.into_iter().map(f64::from_bits).collect()))
                        .unwrap()
                })
                .boxed()
        } else {
            proptest::collection::vec(any::<u32>(), n)
                .prop_map(move |bits| {
                    ArrayFile::new(shape.clone(), ArrayData::F32(bits.into_iter().map(f32::from_bits).collect()))
                        .unwrap()
                })
                .boxed()
        }
    })
}

fn bits(a: &ArrayFile) -> Vec<u64> {
    match a.data() {
        ArrayData::F32(v) => v.iter().map(|x| u64::from(x.to_bits())).collect(),
        ArrayData::F64(v) => v.iter().map(|x| x.to_bits()).collect(),
    }
}

proptest! {
    // arbitrary bit patterns cover NaN payloads, infinities and subnormals
    #[test]
    fn npy_round_trip_is_bit_exact(array in array_strategy()) {
        let bytes = encode_npy(&array).unwrap();
        let back = decode_npy(&bytes).unwrap();
        prop_assert_eq!(back.shape(), array.shape());
        prop_assert_eq!(back.dtype(), array.dtype());
        prop_assert_eq!(bits(&back), bits(&array));
        prop_assert_eq!(encode_npy(&back).unwrap(), bytes);
    }

    #[test]
    fn manifest_round_trip_full_precision(
        seed in any::<u64>(),
        gammas in proptest::collection::vec(1e-6f64..0.999_999, 1..40),
        name in proptest::option::of("[a-z0-9._]{1,20}"),
    ) {
        let polarities = gammas.iter().enumerate()
            .map(|(i, _)| if i % 3 == 0 { Polarity::OffCenter } else { Polarity::OnCenter })
            .collect();
        let manifest = BankManifest {
            schema_version: 1,
            seed,
            config: SamplerConfig { seed, ..SamplerConfig::new(seed, 9) },
            gammas,
            polarities,
            layer_name: name,
        };
        let back = manifest_from_json(&manifest_to_json(&manifest).unwrap()).unwrap();
        prop_assert_eq!(back, manifest);
    }
}

#[test]
fn file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let bank = sample_bank(&SamplerConfig::new(3, 7), 12).unwrap();

    let array = ArrayFile::from_kernels(&bank.kernels, Dtype::F64).unwrap();
    write_array(dir.path().join("bank.npy"), &array).unwrap();
    assert_eq!(read_array(dir.path().join("bank.npy")).unwrap(), array);

    write_manifest(dir.path().join("bank.json"), &bank.manifest).unwrap();
    assert_eq!(read_manifest(dir.path().join("bank.json")).unwrap(), bank.manifest);

    let set = KernelSet::new(bank.kernels.clone(), "bank").unwrap();
    let report = analyze(&set, &KMeansConfig::with_seed(0)).unwrap();
    write_report(dir.path().join("report.json"), &report).unwrap();
    assert_eq!(read_report(dir.path().join("report.json")).unwrap(), report);
}

#[test]
fn gamma_sweep_strip_is_deterministic_and_grows() {
    let kernels: Vec<Kernel> = (2..=8)
        .map(|i| generate_kernel(&DoGSpec::new(9, i as f64 / 10.0, Polarity::OnCenter).unwrap()).unwrap())
        .collect();
    let spec = RenderSpec { columns: 7, cell_px: 18, colormap: Colormap::Diverging, normalize: Normalize::PerKernel };
    let raster = rasterize_grid(&kernels, &spec).unwrap();
    // count reddish pixels per cell: the bright center widens with γ
    let reds: Vec<usize> = (0..7)
        .map(|c| {
            let x0 = 1 + c * 19;
            (1..19)
                .flat_map(|y| (x0..x0 + 18).map(move |x| (x, y)))
                .filter(|&(x, y)| {
                    let p = raster.pixel(x, y);
                    p[0] == 255 && p[2] < 255
                })
                .count()
        })
        .collect();
    assert!(reds.windows(2).all(|w| w[1] >= w[0]), "{reds:?}");
    assert!(reds[6] > reds[0]);

    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
    render_kernel_grid(&kernels, &spec, &a).unwrap();
    render_kernel_grid(&kernels, &spec, &b).unwrap();
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(&bytes[1..4], b"PNG");
    assert_eq!(bytes, std::fs::read(&b).unwrap());

    let rows = vec![ProportionRow { model_tag: "m".into(), on: 0.4, off: 0.4, other: 0.2 }];
    render_histogram(&rows, dir.path().join("h1.svg")).unwrap();
    render_histogram(&rows, dir.path().join("h2.svg")).unwrap();
    assert_eq!(std::fs::read(dir.path().join("h1.svg")).unwrap(), std::fs::read(dir.path().join("h2.svg")).unwrap());
}
