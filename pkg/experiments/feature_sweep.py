"""
Feature-parameter sweeps over a synthetic corpus.

Each sweep varies one extraction setting and records how the PCC table and
the trial-level feature means respond.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.ingest.labels import read_labels_csv
from src.ingest.manifest import corpus_digest, load_manifest
from src.report.analysis import load_corpus, run_analysis
from src.report.emit import canonical_json
from src.report.synth import LABELS_CSV, SynthConfig, synth_corpus
from src.utils.config import RunConfig
from src.utils.errors import SalienceAffectError, error_marker
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class FeatureSweep:
    """Run one-parameter-at-a-time experiments on a shared synthetic corpus."""

    def __init__(
        self,
        output_dir: str = "outputs/experiments",
        synth_config: Optional[SynthConfig] = None,
        base_config: Optional[RunConfig] = None,
    ):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.synth_config = synth_config or SynthConfig(trial_count=40, frames_per_trial=10)
        self.base_config = base_config or RunConfig()
        self._entries = None
        self._labels = None
        self._digest = ""

    def prepare_corpus(self) -> None:
        corpus_dir = self.output_dir / "corpus"
        manifest = synth_corpus(self.synth_config, corpus_dir)
        self._entries = load_manifest(manifest)
        labels_path = corpus_dir / LABELS_CSV
        self._labels = read_labels_csv(labels_path.read_text(encoding="utf-8"))
        self._digest = corpus_digest(self._entries, labels_path)

    def run_single_experiment(self, params: Dict[str, Any], experiment_id: str) -> Dict[str, Any]:
        """Analyze the corpus with ``params`` overriding the base settings."""
        if self._entries is None:
            self.prepare_corpus()
        logger.info(f"Running experiment {experiment_id}: {params}")

        config = self.base_config.model_copy(update=params)
        try:
            corpus = load_corpus(
                self._entries, self._labels, config,
                digest=self._digest, corpus_root=self.output_dir / "corpus",
            )
            report = run_analysis(corpus, config)
        except SalienceAffectError as e:
            logger.error(f"Experiment {experiment_id} failed: {e}")
            return {
                'experiment_id': experiment_id,
                'parameters': params,
                'success': False,
                'error': error_marker(e),
            }

        features = [record.features for record in corpus.trials if record.features is not None]
        return {
            'experiment_id': experiment_id,
            'parameters': params,
            'pcc': {f"{cell.feature}_vs_{cell.emotion}": cell.r for cell in report.pcc_table},
            'mean_saliency_area': float(np.mean([f.mean_saliency_area for f in features])),
            'mean_region_count': float(np.mean([f.mean_region_count for f in features])),
            'trials_complete': report.provenance.trials_complete,
            'success': True,
            'error': None,
        }

    def run_threshold_sweep(self, values: Sequence[float] = (0.3, 0.4, 0.5, 0.6, 0.7)) -> List[Dict]:
        logger.info(f"=== Threshold Sweep: {list(values)} ===")
        return [
            self.run_single_experiment({'threshold': value}, f"threshold_{value:.2f}")
            for value in values
        ]

    def run_connectivity_sweep(self) -> List[Dict]:
        logger.info("=== Connectivity Sweep: [4, 8] ===")
        return [
            self.run_single_experiment({'connectivity': value}, f"connectivity_{value}")
            for value in (4, 8)
        ]

    def run_min_region_sweep(self, values: Sequence[float] = (0.0, 0.001, 0.005, 0.02)) -> List[Dict]:
        """Small-region filtering, from off to aggressive."""
        logger.info(f"=== Min Region Fraction Sweep: {list(values)} ===")
        return [
            self.run_single_experiment({'min_region_fraction': value}, f"min_region_{value:g}")
            for value in values
        ]

    def run_full_sweep(self) -> Dict[str, List[Dict]]:
        logger.info("=== Starting Full Feature Sweep ===")
        all_results = {
            'threshold': self.run_threshold_sweep(),
            'connectivity': self.run_connectivity_sweep(),
            'min_region_fraction': self.run_min_region_sweep(),
        }

        results_path = self.output_dir / "results.json"
        results_path.write_bytes(canonical_json(all_results))
        logger.info(f"Results saved to {results_path}")
        return all_results

    def analyze_results(self, results: Dict[str, List[Dict]]) -> Dict[str, Any]:
        """Per sweep, the setting that gives the strongest region_count/valence correlation."""
        analysis: Dict[str, Any] = {}
        for sweep, runs in results.items():
            usable = [run for run in runs if run['success'] and run['pcc'].get('region_count_vs_valence') is not None]
            if not usable:
                analysis[sweep] = {'finding': "no successful runs"}
                continue
            best = max(usable, key=lambda run: abs(run['pcc']['region_count_vs_valence']))
            analysis[sweep] = {
                'parameter_values': [run['parameters'] for run in usable],
                'region_count_vs_valence': [run['pcc']['region_count_vs_valence'] for run in usable],
                'mean_region_count': [run['mean_region_count'] for run in usable],
                'finding': (
                    f"strongest region_count/valence r={best['pcc']['region_count_vs_valence']:.3f} "
                    f"at {best['parameters']}"
                ),
            }

        analysis_path = self.output_dir / "analysis.json"
        analysis_path.write_bytes(canonical_json(analysis))
        return analysis


def main():
    sweep = FeatureSweep()
    results = sweep.run_full_sweep()
    analysis = sweep.analyze_results(results)

    print("\n=== Findings ===")
    for name, entry in analysis.items():
        print(f"{name}: {entry['finding']}")


if __name__ == "__main__":
    main()
