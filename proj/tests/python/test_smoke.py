import mkdvut


def test_module_imports():
    assert mkdvut.__doc__
