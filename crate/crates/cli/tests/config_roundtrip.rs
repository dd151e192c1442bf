use kdivis::sweep::presets;
use kdivis_cli::config::{preset_config, preset_config_names, ModelConfig, MODEL_PRESETS};
use kdivis_cli::RunConfig;

fn reparse(config: &RunConfig) -> RunConfig {
    RunConfig::from_json(&config.to_json()).unwrap()
}

#[test]
fn every_preset_reparses_to_the_same_config() {
    let names = preset_config_names();
    assert_eq!(names.len(), MODEL_PRESETS.len() + 5);
    for name in names {
        let config = preset_config(&name).unwrap();
        assert_eq!(reparse(&config), config, "{name}");
    }
}

#[test]
fn grid_presets_rebuild_identical_grids() {
    for figure in presets::FIGURE_NAMES {
        for (name, spec) in presets::figure(figure).unwrap() {
            let rebuilt = reparse(&preset_config(&name).unwrap()).grid().unwrap();
            assert_eq!(rebuilt, spec, "{name}");
        }
    }
}

#[test]
fn model_presets_rebuild_identical_dynamics() {
    for name in MODEL_PRESETS {
        let original = ModelConfig::preset(name).unwrap().build().unwrap();
        let rebuilt = reparse(&preset_config(name).unwrap()).model().unwrap().build().unwrap();
        assert_eq!(rebuilt.family(), original.family());
        assert_eq!(rebuilt.default_horizon(), original.default_horizon());
        for t in [0.0, 0.37, 2.5] {
            let (a, b) = (original.propagator(t).unwrap(), rebuilt.propagator(t).unwrap());
            assert_eq!(a.max_abs_diff(&b), 0.0, "{name} at t = {t}");
        }
    }
}

#[test]
fn awkward_floats_survive() {
    let mut config = preset_config("fig4").unwrap();
    config.run.epsilon = Some(0.1 + 0.2);
    config.run.tolerance = Some(std::f64::consts::PI * 1e-9);
    config.sweep.as_mut().unwrap().x.max = 3.0 * std::f64::consts::PI;
    assert_eq!(reparse(&config), config);
}
