# vim: set ai ts=4 sw=4 expandtab:
'''Exceptions raised by phlcost.

Stuck configurations are not errors; the step functions report them as
None. Everything here is a failure of input, of a resource limit, or of a
precondition the caller was responsible for.'''


class PhlError(Exception):
    '''Base class for all phlcost errors.'''


class EmptyChoice(PhlError):
    '''Uniform choice over an empty list.'''


class NonPositiveWeight(PhlError):
    '''Weighted choice with a weight that is not strictly positive.'''


class ParseError(PhlError):
    '''Program or expression text could not be parsed.

    :param message: Description of the problem.
    :param line: 1-based line, or None.
    :param column: 1-based column, or None.
    '''
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            super().__init__(f'{line}:{column}: {message}')
        else:
            super().__init__(message)


class UnboundVariable(ParseError):
    '''A variable occurs outside the scope of any binder.'''
    def __init__(self, name, line=None, column=None):
        self.name = name
        super().__init__(f'unbound variable {name}', line, column)


class ResourceLimit(PhlError):
    '''A configured exploration limit was hit.'''


class NodeLimitExceeded(ResourceLimit):
    '''Configuration graph grew beyond max_nodes.'''


class SupportLimitExceeded(ResourceLimit):
    '''An n-step distribution grew beyond max_support.'''


class MissingNodePotential(PhlError):
    '''Certificate has no potential for a reachable node.'''
    def __init__(self, node):
        self.node = node
        super().__init__(f'no potential for node {node}')


class DomainError(PhlError):
    '''Bound expression evaluated outside its domain.'''


class GraphError(PhlError):
    '''Graph does not meet the solver's preconditions.'''


class CertificateError(PhlError):
    '''Malformed certificate, or one that cannot be extended.'''
