#pragma once

#include <stdexcept>
#include <string>

namespace gclus {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
	virtual const char *kind() const noexcept { return "Error"; }
};

#define GCLUS_ERROR(Name)                                                      \
	class Name : public Error {                                                \
	public:                                                                    \
		explicit Name(const std::string &msg = #Name) : Error(msg) {}          \
		const char *kind() const noexcept override { return #Name; }           \
	};

// graph-core
GCLUS_ERROR(DisconnectedGraph)
GCLUS_ERROR(SelfLoop)
GCLUS_ERROR(NegativeWeight)
GCLUS_ERROR(SingletonGraph)
GCLUS_ERROR(VertexOutOfRange)
GCLUS_ERROR(EmptySources)
GCLUS_ERROR(ParseError)

// oracle
GCLUS_ERROR(EmptyCenters)
GCLUS_ERROR(InstanceTooLarge)
GCLUS_ERROR(InvalidSwap)

// preprocess
GCLUS_ERROR(InvalidK)
GCLUS_ERROR(InvalidEpsilon)

// cluster-state
GCLUS_ERROR(InvalidParams)
GCLUS_ERROR(AlreadyCenter)
GCLUS_ERROR(NotACenter)
GCLUS_ERROR(WouldEmptyCenters)
GCLUS_ERROR(ZeroCost)
GCLUS_ERROR(TokenOrderViolation)

// local-search
GCLUS_ERROR(EpsilonOutOfRange)
GCLUS_ERROR(IterationCapExceeded)

// spanner
GCLUS_ERROR(ScaleOutOfRange)
GCLUS_ERROR(DegenerateDataset)

#undef GCLUS_ERROR

} // namespace gclus
