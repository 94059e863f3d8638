"""
Unit tests for logging setup and job tracking
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor

import pytest

from src.config.logging_config import JobLogger, get_logger, setup_logging


class TestSetupLogging:
    """Test handler configuration"""

    def test_console_only(self, tmp_path):
        """Test no log directory is created without file logging"""
        logger = setup_logging(log_dir=str(tmp_path / 'logs'), level='WARNING')

        assert logger.level == logging.WARNING
        assert len(logger.handlers) == 1
        assert not (tmp_path / 'logs').exists()

    def test_json_file(self, tmp_path):
        """Test file records are JSON with extra fields"""
        setup_logging(log_dir=str(tmp_path), level='INFO', log_file='test.log',
                      file_logging=True, rotation='size', console_colors=False)

        get_logger('tests').info("hello", extra={'camera': 'cam_0'})
        for handler in logging.getLogger('lightrig').handlers:
            handler.close()
        setup_logging(level='INFO')

        record = json.loads((tmp_path / 'test.log').read_text(encoding='utf-8').splitlines()[-1])
        assert record['message'] == 'hello'
        assert record['camera'] == 'cam_0'

    def test_get_logger_namespace(self):
        """Test module loggers live under the lightrig logger"""
        assert get_logger('src.core.batch').name == 'lightrig.src.core.batch'


class TestJobLogger:
    """Test batch job counters"""

    def test_counts(self):
        """Test successes and failures are counted"""
        jobs = JobLogger(3)

        jobs.log_started('a', 'a.exr')
        jobs.log_success('a', 'a.png', 1.0)
        jobs.log_started('b', 'b.exr')
        jobs.log_failure('b', 'missing', 'io')

        assert jobs.started_count == 2
        assert (jobs.success_count, jobs.failed_count) == (1, 1)
        assert jobs.finished_count == 2

    def test_threaded_updates(self):
        """Test counters stay exact under concurrent updates"""
        jobs = JobLogger(400)

        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda i: jobs.log_success(f'cam_{i}', 'out', 0.0), range(400)))

        assert jobs.success_count == 400
        jobs.log_summary()

    def test_summary_reports_finished_jobs(self, mocker):
        """Test the batch summary carries the finished and failed counts"""
        logger = mocker.Mock()
        jobs = JobLogger(3, logger=logger)
        jobs.log_success('a', 'a.png', 1.0)
        jobs.log_failure('b', 'missing', 'io')

        jobs.log_summary()

        message = logger.info.call_args.args[0]
        extra = logger.info.call_args.kwargs['extra']
        assert message == "Batch summary: 2/3 finished, 1 failed"
        assert extra['finished_count'] == 2
        assert extra['success_rate'] == pytest.approx(0.333)
