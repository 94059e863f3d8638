"""
LightRig - Light Field Rig and Lens Reprojection Toolkit
Main entry point for the command-line tools
"""

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.logging_config import get_logger, setup_logging
from src.config.settings import ConfigError, Settings, load_settings
from src.core.batch import (
    EXIT_IO_ERROR,
    EXIT_SUCCESS,
    EXIT_VALIDATION_ERROR,
    OracleRenderBatch,
    ReprojectionBatch,
    ReprojectOptions,
)
from src.geometry.lens import EquidistantFisheye, Equirectangular, LensError, LensModel, Rectilinear
from src.imaging.exr_io import read_exr
from src.imaging.tonemap import ToneMapParams
from src.manifest.lightfield_config import (
    ImagePatternError,
    ManifestError,
    config_from_layout,
    load_config,
    save_config,
    split_train_eval,
)
from src.manifest.nerf import NerfConversionError, resolve_scene_transform, save_transforms, to_nerf_transforms
from src.oracle.scene import OracleScene
from src.reprojection.engine import MAX_SCALE, ColorFilter, ReprojectParams
from src.reprojection.metrics import central_region_mask, compare_images
from src.rig.generator import (
    PRESETS,
    CornersSpec,
    CuboidSpec,
    RigSpecError,
    SphereSpec,
    generate,
    preset_scene_name,
)
from src.rig.statistics import RigStatisticsError, hull_volume, mean_nn_distance
from src.utils.error_formatter import ErrorFormatter

VERSION = '1.0.0'
EXIT_USAGE = 1

logger = get_logger(__name__)


class StrictArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1"""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault('allow_abbrev', False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(value: str, count: Optional[int] = None) -> List[float]:
    try:
        numbers = [float(v) for v in value.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{value}'")
    if count is not None and len(numbers) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got '{value}'")
    if not all(math.isfinite(n) for n in numbers):
        raise argparse.ArgumentTypeError(f"numbers must be finite, got '{value}'")
    return numbers


def _vec3(value: str) -> tuple:
    return tuple(_floats(value, 3))


def _counts(value: str) -> tuple:
    numbers = _floats(value, 3)
    if not all(n == int(n) for n in numbers):
        raise argparse.ArgumentTypeError(f"counts must be integers, got '{value}'")
    return tuple(int(n) for n in numbers)


def _resolution(value: str) -> tuple:
    parts = value.lower().replace('x', ',').split(',')
    try:
        width, height = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected W,H or WxH, got '{value}'")
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"resolution must be at least 1x1, got '{value}'")
    return width, height


def _rectilinear(value: str) -> Rectilinear:
    numbers = _floats(value)
    if len(numbers) == 2:
        focal, sensor_w = numbers
        sensor_h = sensor_w
    elif len(numbers) == 3:
        focal, sensor_w, sensor_h = numbers
    else:
        raise argparse.ArgumentTypeError(f"expected FOCAL,SENSOR or FOCAL,SENSOR_W,SENSOR_H, got '{value}'")
    try:
        return Rectilinear(focal, sensor_w, sensor_h)
    except LensError as e:
        raise argparse.ArgumentTypeError(str(e))


def _fisheye(value: str) -> EquidistantFisheye:
    try:
        return EquidistantFisheye(math.radians(float(value)))
    except (ValueError, LensError) as e:
        raise argparse.ArgumentTypeError(str(e))


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'")
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}")
    return number


def _scale(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{value}'")
    if not 0 < number <= MAX_SCALE:
        raise argparse.ArgumentTypeError(f"must be in (0, {MAX_SCALE:g}], got {value}")
    return number


def _positive_float(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{value}'")
    if not (math.isfinite(number) and number > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {value}")
    return number


def _fraction(value: str) -> float:
    number = _positive_float(value)
    if number > 1:
        raise argparse.ArgumentTypeError(f"must be in (0, 1], got {value}")
    return number


def _add_lens_flags(parser: argparse.ArgumentParser, required: bool):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--rectilinear', type=_rectilinear, metavar='F,S',
                       help='Rectilinear lens: focal length and square sensor size in mm')
    group.add_argument('--fisheye', type=_fisheye, metavar='DEG',
                       help='Equidistant fish-eye lens with the given field of view in degrees')
    group.add_argument('--equirect', action='store_true',
                       help='Full 360x180 degree equirectangular panorama')


def _selected_lens(args) -> Optional[LensModel]:
    if args.rectilinear is not None:
        return args.rectilinear
    if args.fisheye is not None:
        return args.fisheye
    if args.equirect:
        return Equirectangular()
    return None


def build_parser() -> StrictArgumentParser:
    """Build the command-line parser"""
    parser = StrictArgumentParser(
        prog='lightrig',
        description='LightRig - Light field camera rigs, lens reprojection and NeRF export',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate the Lone Monk cuboid rig
  lightrig rig-gen --preset lone-monk-cuboid --output lone_monk/lightfield.json

  # Reproject fish-eye renders to small perspective PNGs for NeRF training
  lightrig reproject --parallel 4 --rectilinear 18,36 --scale 0.125 --samples 8 \\
      --png --exposure -1 --reinhard 5 \\
      --input-dir lone_monk/exr --input-cfg lone_monk/lightfield.json \\
      --output-dir lone_monk/nerf --output-cfg lone_monk/nerf/lightfield.json

  # Convert to instant-ngp transforms
  lightrig nerf-convert --scene lone_monk --dataset-config lone_monk/nerf/lightfield.json \\
      --output-transforms lone_monk/nerf/transforms.json
        """
    )

    parser.add_argument('--config', '-c', type=str, default=None,
                        help='Path to configuration file (default: config/lightrig.yaml)')
    parser.add_argument('--log-level', '-l', type=str,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'], default=None,
                        help='Override log level from config')
    parser.add_argument('--version', '-v', action='version', version=f'LightRig {VERSION}')

    commands = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    reproject = commands.add_parser('reproject', help='Reproject camera images to another lens')
    _add_lens_flags(reproject, required=True)
    reproject.add_argument('--parallel', type=_positive_int, help='Images processed concurrently')
    reproject.add_argument('--scale', type=_scale, help='Output resolution scale factor')
    reproject.add_argument('--samples', type=_positive_int,
                           help='Supersampling grid side (S x S rays per pixel)')
    reproject.add_argument('--filter', choices=[f.value for f in ColorFilter], help='Color filter')
    reproject.add_argument('--png', action='store_true',
                           help='Write tone-mapped 8-bit PNG (depth is dropped) instead of EXR')
    reproject.add_argument('--exposure', type=float, help='Exposure adjustment in stops (PNG only)')
    reproject.add_argument('--reinhard', type=_positive_float,
                           help='Extended Reinhard white luminance (PNG only)')
    reproject.add_argument('--input-dir', required=True, help='Directory the manifest image paths are relative to')
    reproject.add_argument('--input-cfg', required=True, help='Input camera manifest')
    reproject.add_argument('--output-dir', required=True, help='Directory for reprojected images')
    reproject.add_argument('--output-cfg', help='Output manifest (default: OUTPUT_DIR/lightfield.json)')

    rig = commands.add_parser('rig-gen', help='Generate a camera rig manifest')
    source = rig.add_mutually_exclusive_group(required=True)
    source.add_argument('--preset', choices=sorted(PRESETS), help='Published scene rig')
    source.add_argument('--cuboid', type=_vec3, metavar='LX,LY,LZ', help='Cuboid size in meters (Z vertical)')
    source.add_argument('--sphere', type=_positive_float, metavar='DIAMETER', help='Sphere diameter in meters')
    source.add_argument('--corners', type=_positive_float, metavar='SIZE',
                        help='Cube side in meters for the 8 corner panoramas')
    rig.add_argument('--counts', type=_counts, metavar='NX,NY,NZ', help='Cameras per axis (cuboid)')
    rig.add_argument('--subdiv', type=int, default=None, help='Icosphere subdivisions (sphere, default 3)')
    rig.add_argument('--center', type=_vec3, metavar='X,Y,Z', help='Rig center in meters')
    rig.add_argument('--resolution', type=_resolution, metavar='W,H', help='Image size')
    _add_lens_flags(rig, required=False)
    rig.add_argument('--scene-name', help='Scene name stored in the manifest')
    rig.add_argument('--image-pattern', default='exr/{name}.exr',
                     help='Relative image path pattern, with {name} and {sequence}')
    rig.add_argument('--output', required=True, help='Output manifest path')

    nerf = commands.add_parser('nerf-convert', help='Convert a rectilinear manifest to NeRF transforms')
    nerf.add_argument('--scene', help='Scene whose default scale and offset to use')
    nerf.add_argument('--dataset-config', '--input-cfg', dest='dataset_config', required=True,
                      help='Rectilinear camera manifest')
    nerf.add_argument('--output-transforms', required=True, help='Output transforms JSON')
    nerf.add_argument('--scale', type=_positive_float, help='Explicit scene scale')
    nerf.add_argument('--offset', type=_vec3, metavar='X,Y,Z', help='Explicit scene offset')
    nerf.add_argument('--split', choices=['all', 'train', 'eval'], default='all',
                      help='Views to export: all, even sequences (train) or odd sequences (eval)')
    nerf.add_argument('--aabb-scale', type=_positive_int, help='Scene bounding-box scale for the trainer')

    oracle = commands.add_parser('oracle-render', help='Render the analytic test scene for a manifest')
    oracle.add_argument('--input-cfg', required=True, help='Camera manifest (e.g. from rig-gen)')
    oracle.add_argument('--output-dir', required=True, help='Directory for EXR renders and lightfield.json')
    oracle.add_argument('--samples', type=_positive_int, default=1, help='Supersampling grid side')
    oracle.add_argument('--hdr-wall', action='store_true', help='Add the bright HDR wall')
    oracle.add_argument('--depth', choices=['z', 'raylen'], help='Depth convention stored in the EXR files')
    oracle.add_argument('--parallel', type=_positive_int, help='Images rendered concurrently')

    compare = commands.add_parser('compare', help='Compare two EXR images; prints JSON metrics')
    compare.add_argument('--a', required=True, help='First EXR image')
    compare.add_argument('--b', required=True, help='Second EXR image')
    compare.add_argument('--central', type=_fraction, help='Restrict to the central fraction of the image')
    compare.add_argument('--exposure', type=float, default=0.0, help='Exposure applied to both images')

    return parser


def run_reproject(args, settings: Settings) -> int:
    """Reproject every camera of a manifest; returns the exit status"""
    if not args.png and (args.exposure is not None or args.reinhard is not None):
        logger.error("--exposure and --reinhard only apply to --png output")
        return EXIT_USAGE

    defaults = settings.reprojection
    params = ReprojectParams(
        dst_lens=_selected_lens(args),
        scale=args.scale if args.scale is not None else float(defaults['scale']),
        samples=args.samples if args.samples is not None else defaults['samples'],
        color_filter=ColorFilter(args.filter or defaults['filter']),
    )
    tonemap_params = ToneMapParams(
        exposure_stops=args.exposure if args.exposure is not None else float(settings.tonemap['exposure']),
        reinhard_white=args.reinhard if args.reinhard is not None else settings.tonemap['reinhard'],
    )
    options = ReprojectOptions(
        params=params,
        png=args.png,
        tonemap=tonemap_params,
        parallel=args.parallel or defaults['parallel'],
    )

    cfg = load_config(args.input_cfg)
    output_cfg = args.output_cfg or os.path.join(args.output_dir, 'lightfield.json')
    batch = ReprojectionBatch(cfg, args.input_dir, args.output_dir, output_cfg, options)
    return batch.run().exit_code


def run_rig_gen(args, settings: Settings) -> int:
    """Generate a rig manifest; returns the exit status"""
    lens = _selected_lens(args)
    rig_settings = settings.rig

    if args.counts is not None and args.cuboid is None:
        logger.error("--counts only applies to --cuboid")
        return EXIT_USAGE
    if args.subdiv is not None and args.sphere is None:
        logger.error("--subdiv only applies to --sphere")
        return EXIT_USAGE

    if args.preset:
        spec = PRESETS[args.preset]
        scene_name = args.scene_name or preset_scene_name(args.preset)
        changes = {}
        if args.center is not None:
            changes['center'] = args.center
        if args.resolution is not None:
            changes['resolution'] = args.resolution
        if lens is not None:
            changes['lens'] = lens
        spec = replace(spec, **changes)
    else:
        center = args.center or (0.0, 0.0, 0.0)
        scene_name = args.scene_name or 'scene'
        if args.corners is not None:
            spec = CornersSpec(
                size=args.corners,
                center=center,
                lens=lens or Equirectangular(),
                resolution=args.resolution or (2 * rig_settings['resolution'][0], rig_settings['resolution'][0]),
            )
        else:
            lens = lens or EquidistantFisheye(math.radians(rig_settings['fisheye_fov_deg']))
            resolution = args.resolution or tuple(rig_settings['resolution'])
            if args.cuboid is not None:
                if args.counts is None:
                    logger.error("--cuboid needs --counts NX,NY,NZ")
                    return EXIT_USAGE
                spec = CuboidSpec(size=args.cuboid, counts=args.counts, center=center,
                                  lens=lens, resolution=resolution)
            else:
                subdivisions = args.subdiv if args.subdiv is not None else 3
                spec = SphereSpec(diameter=args.sphere, subdivisions=subdivisions, center=center,
                                  lens=lens, resolution=resolution)

    layout = generate(spec)
    try:
        cfg = config_from_layout(layout, scene_name, args.image_pattern)
    except ImagePatternError as e:
        logger.error(f"--image-pattern: {e}")
        return EXIT_USAGE
    save_config(cfg, args.output)

    logger.info(f"Wrote {len(layout)} cameras for scene '{scene_name}' to {args.output}")
    try:
        logger.info(
            f"Mean nearest-neighbour distance {mean_nn_distance(layout):.4f} m, "
            f"hull volume {hull_volume(layout):.4f} m^3"
        )
    except RigStatisticsError as e:
        logger.info(f"Rig statistics unavailable: {e}")
    return EXIT_SUCCESS


def run_nerf_convert(args, settings: Settings) -> int:
    """Convert a rectilinear manifest to NeRF transforms; returns the exit status"""
    cfg = load_config(args.dataset_config)
    if args.split != 'all':
        train, evaluation = split_train_eval(cfg)
        cfg = train if args.split == 'train' else evaluation

    override = settings.nerf_scene_override(args.scene) if args.scene else {}
    scene = resolve_scene_transform(cfg, args.scene, override, args.scale, args.offset)

    output = Path(args.output_transforms)
    prefix = Path(os.path.relpath(Path(args.dataset_config).parent, output.parent)).as_posix()
    aabb_scale = args.aabb_scale or override.get('aabb_scale', settings.nerf['aabb_scale'])

    try:
        transforms = to_nerf_transforms(cfg, scene, '' if prefix == '.' else prefix, int(aabb_scale))
    except NerfConversionError as e:
        logger.error(ErrorFormatter.format_nerf_lens_error(e.camera, str(e)))
        return EXIT_VALIDATION_ERROR

    save_transforms(transforms, output)
    logger.info(
        f"Wrote {len(transforms.frames)} frames to {output} "
        f"(scale={scene.scale:.6g}, offset={[round(c, 6) for c in scene.offset]})"
    )
    return EXIT_SUCCESS


def run_oracle_render(args, settings: Settings) -> int:
    """Render the analytic scene for every camera; returns the exit status"""
    cfg = load_config(args.input_cfg)
    scene = OracleScene()
    if args.hdr_wall:
        scene = scene.with_hdr_wall()
    batch = OracleRenderBatch(
        cfg,
        args.output_dir,
        scene,
        samples=args.samples,
        parallel=args.parallel or settings.reprojection['parallel'],
        depth_interpretation=args.depth or settings.depth_interpretation,
    )
    return batch.run().exit_code


def run_compare(args, settings: Settings) -> int:
    """Compare two EXR images and print metrics as JSON; returns the exit status"""
    a = read_exr(args.a)
    b = read_exr(args.b)
    region = central_region_mask(a.resolution, args.central) if args.central else None
    metrics = compare_images(a, b, region, args.exposure)
    print(json.dumps(metrics.to_dict(), sort_keys=True))
    return EXIT_SUCCESS


COMMANDS = {
    'reproject': run_reproject,
    'rig-gen': run_rig_gen,
    'nerf-convert': run_nerf_convert,
    'oracle-render': run_oracle_render,
    'compare': run_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_settings(args.config)
    except ConfigError as e:
        print(ErrorFormatter.format_config_error(str(e)), file=sys.stderr)
        return EXIT_USAGE

    log_settings = settings.logging
    setup_logging(
        log_dir=log_settings.get('log_dir', 'logs'),
        level=args.log_level or log_settings.get('level', 'INFO'),
        file_logging=bool(log_settings.get('file_logging', False)),
        rotation=log_settings.get('rotation', 'daily'),
        retention_days=log_settings.get('retention_days', 30),
        max_file_size_mb=log_settings.get('max_file_size_mb', 100),
    )
    logger.debug(f"Configuration: {settings.config_file or 'built-in defaults'}")

    try:
        return COMMANDS[args.command](args, settings)
    except ManifestError as e:
        path = getattr(args, 'input_cfg', None) or getattr(args, 'dataset_config', '')
        logger.error(ErrorFormatter.format_manifest_error(str(path), str(e)))
        return EXIT_VALIDATION_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO_ERROR
    except (RigSpecError, ValueError) as e:
        logger.error(f"Validation error: {e}")
        return EXIT_VALIDATION_ERROR
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return 130


if __name__ == '__main__':
    sys.exit(main())
