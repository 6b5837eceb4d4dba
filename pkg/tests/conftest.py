import pytest

from wteleport import available_backends, backend_name, use_backend


@pytest.fixture(params=available_backends())
def backend(request):
    """Run the test once per register-kernel backend."""
    previous = backend_name()
    use_backend(request.param)
    yield request.param
    use_backend(previous)
