"""
Batch Processing
Runs per-camera reprojection and oracle rendering jobs over a camera manifest
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path, PurePosixPath
from typing import Callable, List, Optional

import numpy as np

from src.config.logging_config import JobLogger, get_logger
from src.geometry.depth import Z_DEPTH
from src.imaging.exr_io import ExrMissingError, read_depth_exr, read_exr, write_exr
from src.imaging.plen_image import PlenImage
from src.imaging.png_io import write_png
from src.imaging.tonemap import ToneMapParams, tonemap
from src.manifest.lightfield_config import (
    CameraEntry,
    LightfieldConfig,
    save_config,
)
from src.oracle.render import render_oracle
from src.oracle.scene import OracleScene
from src.reprojection.engine import ReprojectParams, output_resolution, reproject
from src.utils.error_formatter import ErrorFormatter
from src.utils.file_utils import PathLike, is_safe_relative_path

logger = get_logger(__name__)

EXIT_SUCCESS = 0
EXIT_IO_ERROR = 2
EXIT_VALIDATION_ERROR = 3

DEPTH_INTERPRETATION_KEY = 'depth_interpretation'


class ResolutionMismatchError(ValueError):
    """Raised when an image's size disagrees with its manifest entry"""

    def __init__(self, camera: str, expected, actual):
        self.camera = camera
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        super().__init__(ErrorFormatter.format_resolution_mismatch(camera, self.expected, self.actual))


class OutputLayoutError(ValueError):
    """Raised when output images cannot be addressed relative to the output manifest"""
    pass


class CameraJobResult:
    """Result of one camera job"""

    def __init__(
        self,
        camera: CameraEntry,
        success: bool,
        entry: Optional[CameraEntry] = None,
        error_message: Optional[str] = None,
        category: Optional[str] = None,
        elapsed_ms: float = 0.0
    ):
        """
        Initialize job result

        Args:
            camera: Input manifest entry
            success: Whether the job succeeded
            entry: Output manifest entry (on success)
            error_message: Error message (if failed)
            category: Failure category, 'io' or 'validation'
            elapsed_ms: Job wall time
        """
        self.camera = camera
        self.success = success
        self.entry = entry
        self.error_message = error_message
        self.category = category
        self.elapsed_ms = elapsed_ms


class BatchResult:
    """Results of a batch, in manifest order"""

    def __init__(self, jobs: List[CameraJobResult], output_config: Optional[Path] = None):
        self.jobs = jobs
        self.output_config = output_config

    @property
    def failures(self) -> List[CameraJobResult]:
        return [job for job in self.jobs if not job.success]

    @property
    def success(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        """0 on full success, 2 if any job hit an I/O error, else 3"""
        failures = self.failures
        if not failures:
            return EXIT_SUCCESS
        if any(job.category == 'io' for job in failures):
            return EXIT_IO_ERROR
        return EXIT_VALIDATION_ERROR


@dataclass(frozen=True)
class ReprojectOptions:
    params: ReprojectParams
    png: bool = False
    tonemap: ToneMapParams = ToneMapParams()
    parallel: int = 1


def _run_jobs(
    cameras: List[CameraEntry],
    job: Callable[[CameraEntry], CameraEntry],
    parallel: int,
    source_of: Callable[[CameraEntry], str]
) -> List[CameraJobResult]:
    """Run one job per camera on up to `parallel` threads, results in manifest order"""
    job_logger = JobLogger(len(cameras))

    def run(camera: CameraEntry) -> CameraJobResult:
        start = time.perf_counter()
        job_logger.log_started(camera.name, source_of(camera))
        try:
            entry = job(camera)
        except OSError as e:
            job_logger.log_failure(camera.name, str(e), 'io')
            return CameraJobResult(camera, False, error_message=str(e), category='io')
        except ValueError as e:
            job_logger.log_failure(camera.name, str(e), 'validation')
            return CameraJobResult(camera, False, error_message=str(e), category='validation')
        elapsed_ms = (time.perf_counter() - start) * 1000
        job_logger.log_success(camera.name, entry.image, elapsed_ms)
        return CameraJobResult(camera, True, entry=entry, elapsed_ms=elapsed_ms)

    if parallel <= 1:
        results = [run(camera) for camera in cameras]
    else:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run, cameras))

    job_logger.log_summary()
    return results


def _relative_to_manifest(output_dir: Path, image: str, manifest_path: Path) -> str:
    target = output_dir / image
    relative = PurePosixPath(Path(os.path.relpath(target, manifest_path.parent)).as_posix())
    if not is_safe_relative_path(str(relative)):
        raise OutputLayoutError(ErrorFormatter.format_output_path_error(str(target), str(manifest_path)))
    return str(relative)


class ReprojectionBatch:
    """Reprojects every camera image of a manifest to a new lens"""

    def __init__(
        self,
        cfg: LightfieldConfig,
        input_dir: PathLike,
        output_dir: PathLike,
        output_config: PathLike,
        options: ReprojectOptions
    ):
        """
        Initialize batch

        Args:
            cfg: Input manifest; image paths are relative to input_dir
            input_dir: Directory holding the input EXR files
            output_dir: Directory receiving reprojected images
            output_config: Path of the output manifest
            options: Reprojection, tone-mapping and parallelism options

        Raises:
            OutputLayoutError: If output images would not be reachable from the output manifest
        """
        self.cfg = cfg
        self.input_dir = Path(input_dir)
        self.output_dir = Path(output_dir)
        self.output_config = Path(output_config)
        self.options = options

        suffix = '.png' if options.png else '.exr'
        self._outputs = {
            camera.name: str(PurePosixPath(camera.image).with_suffix(suffix)) for camera in cfg.cameras
        }
        self._manifest_paths = {
            name: _relative_to_manifest(self.output_dir, image, self.output_config)
            for name, image in self._outputs.items()
        }

    def run(self) -> BatchResult:
        """
        Process every camera; the output manifest is written only if all succeed

        Returns:
            BatchResult
        """
        params = self.options.params
        logger.info(
            f"Reprojecting {len(self.cfg)} images from {self.input_dir} to {self.output_dir} "
            f"({'PNG' if self.options.png else 'EXR'}, scale={params.scale}, samples={params.samples}, "
            f"filter={params.color_filter.value}, parallel={self.options.parallel})"
        )

        jobs = _run_jobs(
            list(self.cfg.cameras),
            self._process,
            self.options.parallel,
            lambda camera: str(self.input_dir / camera.image),
        )
        result = BatchResult(jobs)
        if result.success:
            entries = [job.entry for job in jobs]
            extra = dict(self.cfg.extra)
            if self.options.png:
                extra.pop(DEPTH_INTERPRETATION_KEY, None)
            save_config(replace(self.cfg.with_cameras(entries), extra=extra), self.output_config)
            result.output_config = self.output_config
            logger.info(f"Wrote output manifest {self.output_config}")
        else:
            logger.error(
                f"{len(result.failures)} of {len(jobs)} images failed; output manifest not written"
            )
        return result

    def _load(self, camera: CameraEntry) -> PlenImage:
        path = self.input_dir / camera.image
        try:
            img = read_exr(path)
        except ExrMissingError:
            raise ExrMissingError(path, ErrorFormatter.format_missing_image(camera.name, str(path)))

        if camera.depth is not None and not self.options.png:
            depth = read_depth_exr(self.input_dir / camera.depth)
            if depth.shape != (img.height, img.width):
                raise ResolutionMismatchError(
                    camera.name, img.resolution, (depth.shape[1], depth.shape[0])
                )
            img = PlenImage(rgb=img.rgb, valid=img.valid, depth=np.where(img.valid, depth, np.inf))

        if img.resolution != tuple(camera.resolution):
            raise ResolutionMismatchError(camera.name, camera.resolution, img.resolution)
        return img

    def _process(self, camera: CameraEntry) -> CameraEntry:
        params = self.options.params
        src = self._load(camera)
        if self.options.png:
            src = src.without_depth()

        out = reproject(src, camera.lens, params)
        target = self.output_dir / self._outputs[camera.name]
        if self.options.png:
            write_png(tonemap(out, self.options.tonemap), target)
        else:
            write_exr(out, target)

        return replace(
            camera,
            lens=params.dst_lens,
            lens_extra={},
            resolution=output_resolution(camera.resolution, params.scale),
            image=self._manifest_paths[camera.name],
            depth=None,
        )


class OracleRenderBatch:
    """Renders the analytic scene for every camera of a manifest"""

    def __init__(
        self,
        cfg: LightfieldConfig,
        output_dir: PathLike,
        scene: OracleScene,
        samples: int = 1,
        parallel: int = 1,
        depth_interpretation: str = Z_DEPTH
    ):
        """
        Initialize batch

        Args:
            cfg: Camera manifest (e.g. a generated rig)
            output_dir: Directory receiving EXR renders and lightfield.json
            scene: Scene to render
            samples: Supersampling grid side
            parallel: Concurrent camera jobs
            depth_interpretation: 'z' or 'raylen' depth stored in the EXR files
        """
        self.cfg = cfg
        self.output_dir = Path(output_dir)
        self.scene = scene
        self.samples = samples
        self.parallel = parallel
        self.depth_interpretation = depth_interpretation

    def run(self) -> BatchResult:
        """
        Render every camera and write the manifest next to the images

        Returns:
            BatchResult
        """
        logger.info(
            f"Rendering oracle scene for {len(self.cfg)} cameras into {self.output_dir} "
            f"(samples={self.samples}, depth={self.depth_interpretation}, parallel={self.parallel})"
        )
        jobs = _run_jobs(
            list(self.cfg.cameras), self._process, self.parallel, lambda camera: 'oracle'
        )
        result = BatchResult(jobs)
        if result.success:
            manifest = self.output_dir / 'lightfield.json'
            extra = dict(self.cfg.extra)
            extra[DEPTH_INTERPRETATION_KEY] = self.depth_interpretation
            save_config(replace(self.cfg.with_cameras([job.entry for job in jobs]), extra=extra), manifest)
            result.output_config = manifest
        return result

    def _process(self, camera: CameraEntry) -> CameraEntry:
        image = str(PurePosixPath(camera.image).with_suffix('.exr'))
        img = render_oracle(
            self.scene, camera.pose(), camera.lens, camera.resolution,
            samples=self.samples, depth_interpretation=self.depth_interpretation,
        )
        write_exr(img, self.output_dir / image)
        return replace(camera, image=image, depth=None)
